// ROC curve rendering. Pure: canned curve JSON in, SVG element out.
// Only plot geometry is computed client-side; the points and AUC come from
// the server untouched.
const SVG_NS = "http://www.w3.org/2000/svg";
const SIZE = 420;
const PAD = 44;
function svgEl(tag, attrs) {
    const node = document.createElementNS(SVG_NS, tag);
    for (const [key, value] of Object.entries(attrs)) {
        node.setAttribute(key, value);
    }
    return node;
}
export function renderRoc(curve) {
    const span = SIZE - 2 * PAD;
    const sx = (fpr) => PAD + fpr * span;
    const sy = (tpr) => SIZE - PAD - tpr * span;
    const svg = svgEl("svg", {
        viewBox: `0 0 ${SIZE} ${SIZE}`,
        width: String(SIZE),
        height: String(SIZE),
        class: "roc-chart",
    });
    svg.append(svgEl("line", { x1: String(PAD), y1: String(SIZE - PAD), x2: String(SIZE - PAD), y2: String(SIZE - PAD), stroke: "#444" }), svgEl("line", { x1: String(PAD), y1: String(PAD), x2: String(PAD), y2: String(SIZE - PAD), stroke: "#444" }), svgEl("line", { x1: String(sx(0)), y1: String(sy(0)), x2: String(sx(1)), y2: String(sy(1)), stroke: "#ccc", "stroke-dasharray": "4 4" }));
    const path = curve.points
        .map(([fpr, tpr], i) => `${i === 0 ? "M" : "L"}${sx(fpr).toFixed(2)},${sy(tpr).toFixed(2)}`)
        .join(" ");
    svg.append(svgEl("path", { d: path, fill: "none", stroke: "#1f6fb2", "stroke-width": "2", class: "roc-path" }));
    const label = svgEl("text", { x: String(SIZE - PAD), y: String(PAD - 10), "text-anchor": "end", "font-size": "13", class: "roc-auc" });
    label.textContent = `AUC = ${curve.auc.toFixed(4)}`;
    svg.append(label);
    return svg;
}
