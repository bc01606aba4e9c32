/**
 * Tagging controls.
 *
 * A free-text tag is applied to every image in the current grid via
 * `POST /api/tags`; existing tag names are offered as suggestions. The
 * export link downloads the service's tag document from
 * `/api/export/tags`. An empty or whitespace-only name never reaches the
 * service — it renders an inline validation message instead.
 */
export class TagManager {
    input;
    error;
    suggestions;
    scope;
    constructor(container, exportUrl, callbacks) {
        container.textContent = "";
        const heading = document.createElement("h2");
        heading.textContent = "Tags";
        container.append(heading);
        const row = document.createElement("div");
        row.className = "tag-row";
        this.input = document.createElement("input");
        this.input.type = "text";
        this.input.className = "tag-input";
        this.input.placeholder = "tag name";
        this.input.setAttribute("list", "tag-suggestions");
        this.suggestions = document.createElement("datalist");
        this.suggestions.id = "tag-suggestions";
        row.append(this.input, this.suggestions);
        const assign = document.createElement("button");
        assign.type = "button";
        assign.className = "tag-assign";
        assign.textContent = "Tag shown images";
        assign.addEventListener("click", () => {
            const name = this.input.value.trim();
            if (!name) {
                this.showError("Enter a tag name first.");
                return;
            }
            this.clearError();
            callbacks.onAssign(name);
        });
        row.append(assign);
        const exportLink = document.createElement("a");
        exportLink.className = "tag-export";
        exportLink.href = exportUrl;
        exportLink.setAttribute("download", "tags.json");
        exportLink.textContent = "Export tags";
        row.append(exportLink);
        container.append(row);
        this.scope = document.createElement("p");
        this.scope.className = "tag-scope";
        container.append(this.scope);
        this.error = document.createElement("p");
        this.error.className = "tag-error";
        this.error.hidden = true;
        container.append(this.error);
    }
    get draft() {
        return this.input.value;
    }
    set draft(value) {
        this.input.value = value;
    }
    setScope(imageCount) {
        const plural = imageCount === 1 ? "image" : "images";
        this.scope.textContent = imageCount > 0 ? `Applies to the ${imageCount} ${plural} in the grid.` : "Nothing in the grid to tag.";
    }
    setSuggestions(tags) {
        this.suggestions.textContent = "";
        for (const tag of tags) {
            const option = document.createElement("option");
            option.value = tag;
            this.suggestions.append(option);
        }
    }
    showError(message) {
        this.error.textContent = message;
        this.error.hidden = false;
    }
    clearError() {
        this.error.hidden = true;
    }
}
//# sourceMappingURL=tags.js.map