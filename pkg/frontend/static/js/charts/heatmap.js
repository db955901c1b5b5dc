// Heatmap rendering from the server's matrix JSON; missing cells show as "-".
const SVG_NS = "http://www.w3.org/2000/svg";
const CELL = 54;
const LABEL_W = 150;
const LABEL_H = 90;
function svgEl(tag, attrs, text) {
    const node = document.createElementNS(SVG_NS, tag);
    for (const [key, value] of Object.entries(attrs)) {
        node.setAttribute(key, value);
    }
    if (text !== undefined)
        node.textContent = text;
    return node;
}
function ramp(t) {
    const clamped = Math.min(1, Math.max(0, t));
    const r = Math.round(247 - clamped * (247 - 33));
    const g = Math.round(251 - clamped * (251 - 113));
    const b = Math.round(255 - clamped * (255 - 181));
    return `rgb(${r},${g},${b})`;
}
export function renderHeatmap(data) {
    const width = LABEL_W + CELL * Math.max(1, data.col_labels.length) + 12;
    const height = LABEL_H + CELL * Math.max(1, data.row_labels.length) + 12;
    const svg = svgEl("svg", {
        viewBox: `0 0 ${width} ${height}`,
        width: String(width),
        height: String(height),
        class: "heatmap-chart",
    });
    const values = data.cells.flat().filter((v) => v !== null);
    const lo = values.length ? Math.min(...values) : 0;
    const hi = values.length ? Math.max(...values) : 1;
    const span = hi - lo || 1;
    data.cells.forEach((row, i) => {
        row.forEach((value, j) => {
            const x = LABEL_W + j * CELL;
            const y = LABEL_H + i * CELL;
            svg.append(svgEl("rect", {
                x: String(x), y: String(y), width: String(CELL), height: String(CELL),
                fill: value === null ? "#eee" : ramp((value - lo) / span),
                stroke: "#fff",
                class: "heatmap-cell",
                "data-row": data.row_labels[i],
                "data-col": data.col_labels[j],
            }));
            svg.append(svgEl("text", {
                x: String(x + CELL / 2), y: String(y + CELL / 2 + 4),
                "text-anchor": "middle", "font-size": "11",
            }, value === null ? "-" : value.toFixed(2)));
        });
    });
    data.row_labels.forEach((label, i) => {
        svg.append(svgEl("text", {
            x: String(LABEL_W - 6), y: String(LABEL_H + i * CELL + CELL / 2 + 4),
            "text-anchor": "end", "font-size": "11", class: "heatmap-row-label",
        }, label));
    });
    data.col_labels.forEach((label, j) => {
        const x = LABEL_W + j * CELL + CELL / 2;
        svg.append(svgEl("text", {
            x: String(x), y: String(LABEL_H - 8),
            "text-anchor": "start", "font-size": "11", class: "heatmap-col-label",
            transform: `rotate(-45 ${x} ${LABEL_H - 8})`,
        }, label));
    });
    svg.append(svgEl("text", { x: "8", y: "16", "font-size": "13" }, `best ${data.metric} per algorithm and dataset`));
    return svg;
}
