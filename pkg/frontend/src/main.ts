import { ApiClient } from "./api.js";
import { ExplorerApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const app = new ExplorerApp(root, new ApiClient(""));
  app.init().catch((error) => {
    root.textContent = `failed to load artifact metadata: ${error instanceof Error ? error.message : error}`;
  });
}
