// REST client. Every mutating call carries a fresh request id so a retry
// replays the original response instead of repeating the side effect, and
// list refreshes are sequenced so stale responses never overwrite newer ones.
export class ApiError extends Error {
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
function requestId() {
    if (typeof crypto !== "undefined" && "randomUUID" in crypto) {
        return crypto.randomUUID();
    }
    return `req-${Date.now()}-${Math.random().toString(36).slice(2)}`;
}
export class Api {
    constructor(base = "") {
        this.base = base;
    }
    async call(path, init) {
        const response = await fetch(this.base + path, init);
        if (!response.ok) {
            let detail = response.statusText;
            try {
                const body = await response.json();
                detail = body.detail ?? JSON.stringify(body);
            }
            catch {
                /* non-JSON error body */
            }
            throw new ApiError(response.status, detail);
        }
        return (await response.json());
    }
    post(path, body) {
        return this.call(path, {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify({ ...body, request_id: requestId() }),
        });
    }
    listDatasets() {
        return this.call("/datasets").then((r) => r.datasets);
    }
    getDataset(id) {
        return this.call(`/datasets/${id}`);
    }
    uploadDataset(form) {
        return this.call("/datasets", { method: "POST", body: form });
    }
    algorithms(task) {
        return this.call(`/algorithms?task=${encodeURIComponent(task)}`).then((r) => r.algorithms);
    }
    submitExperiment(body) {
        return this.post("/experiments", body);
    }
    listExperiments(filters = {}) {
        const query = new URLSearchParams(filters).toString();
        return this.call(`/experiments${query ? "?" + query : ""}`).then((r) => r.experiments);
    }
    getExperiment(id) {
        return this.call(`/experiments/${id}`);
    }
    sendFeedback(experimentId, vote) {
        return this.post(`/experiments/${experimentId}/feedback`, { vote });
    }
    recommendations(datasetId, n) {
        return this.call(`/recommendations?dataset_id=${encodeURIComponent(datasetId)}&n=${n}`).then((r) => r.recommendations);
    }
    createSession(body) {
        return this.post("/ai/sessions", body);
    }
    toggleSession(sessionId, enabled) {
        return this.call(`/ai/sessions/${sessionId}/toggle`, {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify({ enabled }),
        });
    }
    listSessions() {
        return this.call("/ai/sessions").then((r) => r.sessions);
    }
    heatmap(metric) {
        return this.call(`/reports/heatmap?metric=${encodeURIComponent(metric)}`);
    }
    roc(experimentId) {
        return this.call(`/experiments/${experimentId}/roc`);
    }
}
/** Drops responses that arrive after a newer request for the same key. */
export class Sequencer {
    constructor() {
        this.seq = new Map();
    }
    async latest(key, work) {
        const ticket = (this.seq.get(key) ?? 0) + 1;
        this.seq.set(key, ticket);
        const value = await work;
        return this.seq.get(key) === ticket ? value : null;
    }
}
