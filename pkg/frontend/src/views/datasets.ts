// Dataset management: upload, list, and per-dataset detail with
// meta-features, recommendations, and links into the other views.

import { Api } from "../api.js";
import { clear, el, errorBanner, fmt } from "../dom.js";
import type { DatasetRecord } from "../types.js";

export class DatasetList {
  readonly root = el("section", { class: "dataset-list" });

  constructor(private api: Api) {}

  async render(): Promise<HTMLElement> {
    const datasets = await this.api.listDatasets();
    clear(this.root);
    this.root.append(el("h2", {}, ["datasets"]), this.uploadForm());
    if (!datasets.length) {
      this.root.append(el("p", {}, ["nothing uploaded yet"]));
      return this.root;
    }
    const table = el("table", { class: "datasets-table" });
    table.append(el("tr", {}, ["name", "task", "rows", "tags"].map((h) => el("th", {}, [h]))));
    for (const ds of datasets) {
      table.append(el("tr", { class: "dataset-row", "data-id": ds.id }, [
        el("td", {}, [el("a", { href: `#/datasets/${ds.id}` }, [ds.name])]),
        el("td", {}, [ds.task_type]),
        el("td", {}, [String(ds.n_rows)]),
        el("td", {}, [ds.tags.join(", ")]),
      ]));
    }
    this.root.append(table);
    return this.root;
  }

  private uploadForm(): HTMLElement {
    const file = el("input", { type: "file", accept: ".csv,text/csv", name: "file" });
    const target = el("input", { type: "text", placeholder: "target column", name: "target_column" });
    const task = el("select", { name: "task_type" }, [
      el("option", { value: "classification" }, ["classification"]),
      el("option", { value: "regression" }, ["regression"]),
    ]);
    const tags = el("input", { type: "text", placeholder: "tags (comma separated)", name: "tags" });
    const status = el("span", { class: "upload-status" });
    const button = el("button", { type: "button", class: "upload-button" }, ["upload"]);
    button.addEventListener("click", () => {
      const chosen = file.files?.[0];
      if (!chosen || !target.value) {
        status.replaceChildren(errorBanner("choose a file and a target column"));
        return;
      }
      const form = new FormData();
      form.append("file", chosen);
      form.append("name", chosen.name);
      form.append("target_column", target.value);
      form.append("task_type", task.value);
      form.append("tags", tags.value);
      void this.api.uploadDataset(form)
        .then(() => this.render())
        .catch((err) => status.replaceChildren(errorBanner(String(err))));
    });
    return el("div", { class: "upload-form" }, [file, target, task, tags, button, status]);
  }
}

export class DatasetDetail {
  readonly root = el("section", { class: "dataset-detail" });

  constructor(private api: Api, private datasetId: string) {}

  async render(): Promise<HTMLElement> {
    const ds = await this.api.getDataset(this.datasetId);
    const recommendations = await this.api.recommendations(ds.id, 5);
    clear(this.root);
    const meta = el("ul", { class: "meta-list" });
    for (const [name, value] of Object.entries(ds.meta_features)) {
      meta.append(el("li", {}, [`${name}: ${fmt(value, 3)}`]));
    }
    const recs = el("ol", { class: "recommendation-list" });
    for (const rec of recommendations) {
      recs.append(el("li", { "data-rank": String(rec.rank) }, [
        `${rec.algorithm} ${JSON.stringify(rec.parameters)} ` +
        `(expected ${fmt(rec.expected_score)})`,
        el("p", { class: "rationale" }, [rec.rationale]),
      ]));
    }
    this.root.append(
      el("h2", {}, [ds.name]),
      el("p", {}, [`${ds.task_type}, ${ds.n_rows} rows, target "${ds.target_column}", ` +
                   `tags: ${ds.tags.join(", ") || "none"}`]),
      el("nav", { class: "dataset-actions" }, [
        el("a", { href: `#/launch/${ds.id}`, class: "action-launch" }, ["launch analysis"]),
        " | ",
        el("a", { href: `#/ai/${ds.id}`, class: "action-ai" }, ["AI panel"]),
        " | ",
        el("a", { href: `#/experiments?dataset=${ds.id}` }, ["experiments"]),
      ]),
      el("h3", {}, ["meta-features"]), meta,
      el("h3", {}, ["suggested next analyses"]), recs,
    );
    return this.root;
  }
}
