// Experiment list and detail. Completed rows carry thumbs up/down controls
// wired straight to the feedback endpoint; the buttons re-render from the
// server response, never from local guesses.
import { clear, el, errorBanner, fmt } from "../dom.js";
import { renderRoc } from "../charts/roc.js";
function headlineMetric(record) {
    const metrics = record.result?.metrics;
    if (!metrics)
        return "-";
    const name = record.task_type === "classification" ? "balanced_accuracy" : "r2";
    return `${name}=${fmt(metrics[name])}`;
}
export class ExperimentList {
    constructor(api, datasetId) {
        this.api = api;
        this.datasetId = datasetId;
        this.root = el("section", { class: "experiment-list" });
    }
    async render() {
        const filters = {};
        if (this.datasetId)
            filters.dataset_id = this.datasetId;
        const records = await this.api.listExperiments(filters);
        clear(this.root);
        this.root.append(el("h2", {}, ["experiments"]));
        if (!records.length) {
            this.root.append(el("p", {}, ["no experiments yet"]));
            return this.root;
        }
        const table = el("table", { class: "experiments-table" });
        table.append(el("tr", {}, ["algorithm", "status", "by", "metric", "feedback", ""].map((h) => el("th", {}, [h]))));
        for (const record of records) {
            table.append(this.row(record));
        }
        this.root.append(table);
        return this.root;
    }
    row(record) {
        const tr = el("tr", { class: `experiment-row status-${record.status}`, "data-id": record.id });
        const link = el("a", { href: `#/experiments/${record.id}` }, [record.algorithm]);
        tr.append(el("td", {}, [link]), el("td", {}, [record.status]), el("td", {}, [record.launched_by]), el("td", {}, [headlineMetric(record)]), el("td", { class: "feedback-cell" }, [this.feedbackControls(record)]), el("td", {}, [record.error ?? ""]));
        return tr;
    }
    feedbackControls(record) {
        const box = el("span", { class: "feedback-controls" });
        if (record.status !== "completed") {
            return box;
        }
        const up = el("button", {
            class: "thumb thumb-up" + (record.feedback === "up" ? " active" : ""),
            title: "useful result",
            "data-vote": "up",
        }, ["\u{1F44D}"]);
        const down = el("button", {
            class: "thumb thumb-down" + (record.feedback === "down" ? " active" : ""),
            title: "not useful",
            "data-vote": "down",
        }, ["\u{1F44E}"]);
        const send = async (vote) => {
            try {
                const updated = await this.api.sendFeedback(record.id, vote);
                box.replaceWith(this.feedbackControls(updated));
            }
            catch (err) {
                box.append(errorBanner(String(err)));
            }
        };
        up.addEventListener("click", () => void send("up"));
        down.addEventListener("click", () => void send("down"));
        box.append(up, down);
        return box;
    }
}
export class ExperimentDetail {
    constructor(api, experimentId) {
        this.api = api;
        this.experimentId = experimentId;
        this.root = el("section", { class: "experiment-detail" });
    }
    async render() {
        const record = await this.api.getExperiment(this.experimentId);
        clear(this.root);
        this.root.append(el("h2", {}, [`${record.algorithm} on ${record.dataset_id.slice(0, 12)}`]), el("p", { class: "experiment-meta" }, [
            `status ${record.status} | launched by ${record.launched_by} | ` +
                `seed ${record.seed} | ${record.cv_folds}-fold`,
        ]), el("pre", { class: "parameters" }, [JSON.stringify(record.parameters, null, 2)]));
        if (record.result) {
            const list = el("ul", { class: "metric-list" });
            for (const [name, value] of Object.entries(record.result.metrics)) {
                list.append(el("li", {}, [`${name}: ${fmt(value)}`]));
            }
            this.root.append(list);
            if (record.result.roc) {
                this.root.append(renderRoc(record.result.roc));
            }
        }
        if (record.error) {
            this.root.append(errorBanner(record.error));
        }
        return this.root;
    }
}
