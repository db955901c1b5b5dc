// Reports: the cross-method heatmap plus a ROC viewer for any completed
// classification experiment.
import { Sequencer } from "../api.js";
import { clear, el, errorBanner } from "../dom.js";
import { renderHeatmap } from "../charts/heatmap.js";
import { renderRoc } from "../charts/roc.js";
const CLASSIFICATION_METRICS = ["balanced_accuracy", "accuracy", "f1_macro", "auc"];
export class ReportsView {
    constructor(api) {
        this.api = api;
        this.root = el("section", { class: "reports-view" });
        this.heatmapBox = el("div", { class: "heatmap-box" });
        this.rocBox = el("div", { class: "roc-box" });
        this.sequencer = new Sequencer();
    }
    async render() {
        clear(this.root);
        const metricSelect = el("select", { class: "metric-select" }, CLASSIFICATION_METRICS.map((m) => el("option", { value: m }, [m])));
        metricSelect.addEventListener("change", () => void this.loadHeatmap(metricSelect.value));
        const completed = (await this.api.listExperiments({ status: "completed" }))
            .filter((e) => e.task_type === "classification");
        const rocSelect = el("select", { class: "roc-select" }, completed.map((e) => el("option", { value: e.id }, [`${e.algorithm} ${e.id.slice(0, 10)}`])));
        rocSelect.addEventListener("change", () => void this.loadRoc(rocSelect.value));
        this.root.append(el("h2", {}, ["reports"]), el("label", {}, ["metric ", metricSelect]), this.heatmapBox, el("h3", {}, ["ROC curves"]), el("label", {}, ["experiment ", rocSelect]), this.rocBox);
        await this.loadHeatmap(metricSelect.value);
        if (completed.length) {
            await this.loadRoc(completed[0].id);
        }
        return this.root;
    }
    async loadHeatmap(metric) {
        try {
            const data = await this.sequencer.latest("heatmap", this.api.heatmap(metric));
            if (data === null)
                return; // a newer request superseded this one
            clear(this.heatmapBox);
            this.heatmapBox.append(renderHeatmap(data));
        }
        catch (err) {
            clear(this.heatmapBox).append(errorBanner(String(err)));
        }
    }
    async loadRoc(experimentId) {
        try {
            const curve = await this.sequencer.latest("roc", this.api.roc(experimentId));
            if (curve === null)
                return;
            clear(this.rocBox);
            this.rocBox.append(renderRoc(curve));
        }
        catch (err) {
            clear(this.rocBox).append(errorBanner(String(err)));
        }
    }
}
