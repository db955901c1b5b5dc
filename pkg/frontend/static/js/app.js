// Hash router and bootstrap. Each route builds a fresh view against the API;
// the UI never computes results itself.
import { Api } from "./api.js";
import { clear, el, errorBanner } from "./dom.js";
import { AiPanel } from "./views/ai.js";
import { DatasetDetail, DatasetList } from "./views/datasets.js";
import { ExperimentDetail, ExperimentList } from "./views/experiments.js";
import { LaunchForm } from "./views/launch.js";
import { ReportsView } from "./views/reports.js";
export class App {
    constructor(outlet) {
        this.outlet = outlet;
        this.api = new Api();
    }
    start() {
        window.addEventListener("hashchange", () => void this.route());
        void this.route();
    }
    async route() {
        const hash = window.location.hash.replace(/^#\/?/, "");
        const [path, query] = hash.split("?");
        const parts = path.split("/").filter(Boolean);
        clear(this.outlet);
        try {
            if (parts.length === 0 || parts[0] === "datasets") {
                if (parts[1]) {
                    this.outlet.append(await new DatasetDetail(this.api, parts[1]).render());
                }
                else {
                    this.outlet.append(await new DatasetList(this.api).render());
                }
            }
            else if (parts[0] === "launch" && parts[1]) {
                const dataset = await this.api.getDataset(parts[1]);
                this.outlet.append(await new LaunchForm(this.api, dataset).render());
            }
            else if (parts[0] === "experiments") {
                if (parts[1]) {
                    this.outlet.append(await new ExperimentDetail(this.api, parts[1]).render());
                }
                else {
                    const datasetId = new URLSearchParams(query ?? "").get("dataset") ?? undefined;
                    this.outlet.append(await new ExperimentList(this.api, datasetId).render());
                }
            }
            else if (parts[0] === "ai" && parts[1]) {
                const dataset = await this.api.getDataset(parts[1]);
                this.outlet.append(await new AiPanel(this.api, dataset).render());
            }
            else if (parts[0] === "reports") {
                this.outlet.append(await new ReportsView(this.api).render());
            }
            else {
                this.outlet.append(el("p", {}, ["page not found"]));
            }
        }
        catch (err) {
            this.outlet.append(errorBanner(String(err)));
        }
    }
}
export function mount() {
    const outlet = document.getElementById("app");
    if (outlet) {
        new App(outlet).start();
    }
}
if (typeof document !== "undefined" && document.getElementById("app")) {
    mount();
}
