// Small DOM construction helper; no framework, no templates.
export function el(tag, attrs = {}, children = []) {
    const node = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) {
        if (key === "class")
            node.className = value;
        else
            node.setAttribute(key, value);
    }
    for (const child of children) {
        node.append(child);
    }
    return node;
}
export function clear(node) {
    node.replaceChildren();
    return node;
}
export function errorBanner(message) {
    return el("div", { class: "error-banner", role: "alert" }, [message]);
}
export function fmt(value, digits = 4) {
    return value == null ? "-" : value.toFixed(digits);
}
