// AI panel: enable the assistant on a dataset with a run budget and update
// cadence, and toggle existing sessions on and off.
import { clear, el, errorBanner } from "../dom.js";
export class AiPanel {
    constructor(api, dataset) {
        this.api = api;
        this.dataset = dataset;
        this.root = el("section", { class: "ai-panel" });
        this.maxRuns = el("input", { type: "number", value: "10", min: "0", name: "max_runs" });
        this.updateEvery = el("input", { type: "number", value: "1", min: "1", name: "update_every" });
        this.epsilon = el("input", {
            type: "number", value: "0.1", min: "0", max: "1", step: "0.05", name: "epsilon",
        });
        this.sessionBox = el("div", { class: "session-box" });
        this.status = el("div", { class: "ai-status" });
    }
    async render() {
        clear(this.root);
        const start = el("button", { class: "ai-start", type: "button" }, ["enable AI"]);
        start.addEventListener("click", () => void this.start());
        this.root.append(el("h2", {}, [`AI assistant for ${this.dataset.name}`]), el("label", {}, ["maximum runs the AI may launch ", this.maxRuns]), el("label", {}, ["send an update every N completions ", this.updateEvery]), el("label", {}, ["exploration probability ", this.epsilon]), start, this.status, this.sessionBox);
        await this.refreshSessions();
        return this.root;
    }
    async start() {
        clear(this.status);
        try {
            await this.api.createSession({
                dataset_id: this.dataset.id,
                max_runs: Number(this.maxRuns.value),
                update_every: Number(this.updateEvery.value),
                epsilon: Number(this.epsilon.value),
                enabled: true,
            });
            await this.refreshSessions();
        }
        catch (err) {
            this.status.append(errorBanner(String(err)));
        }
    }
    async refreshSessions() {
        const sessions = (await this.api.listSessions())
            .filter((s) => s.dataset_id === this.dataset.id);
        clear(this.sessionBox);
        for (const session of sessions) {
            this.sessionBox.append(this.sessionRow(session));
        }
    }
    sessionRow(session) {
        const row = el("div", { class: "session-row", "data-session": session.session_id });
        const toggle = el("input", { type: "checkbox", class: "ai-toggle" });
        toggle.checked = session.enabled;
        toggle.addEventListener("change", () => {
            void this.api
                .toggleSession(session.session_id, toggle.checked)
                .then(() => this.refreshSessions())
                .catch((err) => row.append(errorBanner(String(err))));
        });
        const text = `${session.runs_launched}/${session.max_runs} runs` +
            (session.stop_reason ? ` (stopped: ${session.stop_reason})` : "");
        row.append(el("label", {}, [toggle, session.enabled ? " on " : " off ", text]));
        return row;
    }
}
