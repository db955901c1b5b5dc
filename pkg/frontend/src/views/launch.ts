// Launch form: one select per curated parameter, with its plain-language
// description underneath. Nothing outside the menu is offered; the advanced
// section adds only the grid-search toggle.

import { Api } from "../api.js";
import { clear, el, errorBanner } from "../dom.js";
import type { AlgorithmSpec, DatasetRecord } from "../types.js";

function valueLabel(value: string | number | null): string {
  return value === null ? "no limit" : String(value);
}

function encodeValue(value: string | number | null): string {
  return JSON.stringify(value);
}

export class LaunchForm {
  readonly root: HTMLElement;
  private specs: AlgorithmSpec[] = [];
  private paramBox: HTMLElement;
  private algorithmSelect: HTMLSelectElement;
  private gridToggle: HTMLInputElement;
  private status: HTMLElement;

  constructor(private api: Api, private dataset: DatasetRecord,
              private onLaunched?: () => void) {
    this.paramBox = el("div", { class: "param-box" });
    this.algorithmSelect = el("select", { class: "algorithm-select", name: "algorithm" });
    this.gridToggle = el("input", { type: "checkbox", class: "grid-toggle", name: "grid" });
    this.status = el("div", { class: "launch-status" });
    this.root = el("section", { class: "launch-form" });
  }

  async render(): Promise<HTMLElement> {
    this.specs = await this.api.algorithms(this.dataset.task_type);
    clear(this.root);
    this.algorithmSelect.replaceChildren(
      ...this.specs.map((s) => el("option", { value: s.name }, [s.name])),
    );
    this.algorithmSelect.addEventListener("change", () => this.renderParams());

    const advanced = el("details", { class: "advanced" }, [
      el("summary", {}, ["advanced"]),
      el("label", { class: "grid-label" }, [
        this.gridToggle,
        " run the full parameter grid for this algorithm",
      ]),
    ]);
    const submit = el("button", { class: "launch-button", type: "button" }, ["launch"]);
    submit.addEventListener("click", () => void this.submit());

    this.root.append(
      el("h2", {}, [`new analysis on ${this.dataset.name}`]),
      el("label", {}, ["algorithm ", this.algorithmSelect]),
      this.paramBox,
      advanced,
      submit,
      this.status,
    );
    this.renderParams();
    return this.root;
  }

  private spec(): AlgorithmSpec {
    const name = this.algorithmSelect.value || this.specs[0].name;
    return this.specs.find((s) => s.name === name) ?? this.specs[0];
  }

  private renderParams(): void {
    const spec = this.spec();
    clear(this.paramBox);
    for (const param of spec.params) {
      const select = el("select", { class: "param-select", name: param.name });
      select.replaceChildren(
        ...param.allowed.map((value) => {
          const option = el("option", { value: encodeValue(value) }, [valueLabel(value)]);
          if (value === param.default) option.selected = true;
          return option;
        }),
      );
      this.paramBox.append(
        el("div", { class: "param-row", "data-param": param.name }, [
          el("label", {}, [param.name, " ", select]),
          el("p", { class: "param-description" }, [param.description]),
        ]),
      );
    }
  }

  currentParameters(): Record<string, unknown> {
    const out: Record<string, unknown> = {};
    this.paramBox.querySelectorAll<HTMLSelectElement>("select.param-select").forEach((s) => {
      out[s.name] = JSON.parse(s.value);
    });
    return out;
  }

  async submit(): Promise<void> {
    clear(this.status);
    try {
      const grid = this.gridToggle.checked;
      const response = await this.api.submitExperiment({
        dataset_id: this.dataset.id,
        algorithm: this.spec().name,
        parameters: grid ? undefined : this.currentParameters(),
        grid,
        cv: { folds: 5, seed: 0 },
      });
      const text = response.count !== undefined
        ? `submitted ${response.count} grid experiments`
        : `submitted experiment ${response.experiment_id}` +
          (response.duplicate ? " (already existed)" : "");
      this.status.append(el("p", { class: "launch-ok" }, [text]));
      this.onLaunched?.();
    } catch (err) {
      this.status.append(errorBanner(String(err)));
    }
  }
}
