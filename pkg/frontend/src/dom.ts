// Small DOM construction helper; no framework, no templates.

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function clear(node: HTMLElement): HTMLElement {
  node.replaceChildren();
  return node;
}

export function errorBanner(message: string): HTMLElement {
  return el("div", { class: "error-banner", role: "alert" }, [message]);
}

export function fmt(value: number | null | undefined, digits = 4): string {
  return value == null ? "-" : value.toFixed(digits);
}
