"""Command-line client and server launcher.

Every command except `serve` is a thin client of the REST API; `serve`
hosts the service (with in-process workers) in the foreground.  Exit codes:
0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import json
import os
import sys

import click

from mlassist.errors import MlAssistError
from mlassist.service.client import ApiClient, ApiError
from mlassist.service.config import load_config

DEFAULT_SERVER = "http://127.0.0.1:8425"


def _client(ctx) -> ApiClient:
    return ApiClient(ctx.obj["server"], token=ctx.obj.get("token"))


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _emit(ctx, payload, human):
    if ctx.obj["json"]:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        human(payload)


def _table(rows: list[list[str]], header: list[str]) -> str:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    fmt = "  ".join("{:<%d}" % w for w in widths)
    lines = [fmt.format(*header)] + [fmt.format(*(str(c) for c in row)) for row in rows]
    return "\n".join(lines)


@click.group()
@click.option("--server", default=None, help="Service URL (env MLASSIST_SERVER).")
@click.option("--token", default=None, help="Bearer token (env API_TOKEN).")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def main(ctx, server, token, as_json):
    """mlassist: a self-hosted data science assistant."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server or os.environ.get("MLASSIST_SERVER", DEFAULT_SERVER)
    ctx.obj["token"] = token or os.environ.get("API_TOKEN")
    ctx.obj["json"] = as_json


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.pass_context
def serve(ctx, config_path):
    """Start the service with in-process workers."""
    import uvicorn
    from mlassist.service.app import create_app

    config = load_config(config_path)
    app = create_app(config)
    click.echo(f"listening on http://{config.host}:{config.port} "
               f"(data in {config.data_dir}, {config.workers} workers)")
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")


@main.command()
@click.option("--server", "server_url", default=None, help="Service URL to pull jobs from.")
@click.pass_context
def worker(ctx, server_url):
    """Run a remote worker against a service."""
    from mlassist.service.client import RemoteWorker

    url = server_url or ctx.obj["server"]
    client = ApiClient(url, token=ctx.obj.get("token"))
    click.echo(f"worker polling {url}")
    try:
        RemoteWorker(client).run_forever()
    except KeyboardInterrupt:
        pass


@main.command()
@click.argument("file", type=click.Path(exists=True))
@click.option("--target", required=True, help="Target column name.")
@click.option("--task", required=True, type=click.Choice(["classification", "regression"]))
@click.option("--tags", default="", help="Comma-separated tags.")
@click.option("--name", default=None, help="Display name (defaults to the file name).")
@click.pass_context
def ingest(ctx, file, target, task, tags, name):
    """Upload a CSV dataset."""
    with open(file, "rb") as fh:
        raw = fh.read()
    client = _client(ctx)
    try:
        payload = client.ingest(raw, os.path.basename(file),
                                name or os.path.basename(file), target, task, tags)
    except MlAssistError as exc:
        _fail(str(exc))
    _emit(ctx, payload, lambda p: click.echo(
        f"{'created' if p['created'] else 'already ingested'}: "
        f"{p['dataset']['id']} ({p['dataset']['n_rows']} rows)"))


def _parse_param(raw: str):
    key, _, value = raw.partition("=")
    if not _:
        raise click.UsageError(f"--param needs key=value, got {raw!r}")
    lowered = value.lower()
    if lowered in ("none", "null", "unbounded"):
        return key, None
    for cast in (int, float):
        try:
            return key, cast(value)
        except ValueError:
            continue
    return key, value


@main.command()
@click.option("--dataset", "dataset_id", required=True)
@click.option("--algorithm", default=None)
@click.option("--param", "params", multiple=True, help="k=v, repeatable.")
@click.option("--grid", is_flag=True, help="Expand the curated grid.")
@click.option("--folds", default=5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.pass_context
def run(ctx, dataset_id, algorithm, params, grid, folds, seed):
    """Launch one analysis (or a grid search with --grid)."""
    if not grid and not algorithm:
        raise click.UsageError("--algorithm is required unless --grid is set")
    parameters = dict(_parse_param(p) for p in params)
    client = _client(ctx)
    try:
        payload = client.submit_experiment(dataset_id, algorithm, parameters or None,
                                           grid, folds, seed)
    except ApiError as exc:
        if "UnknownAlgorithmError" in str(exc.payload):
            raise click.UsageError(str(exc))
        _fail(str(exc))
    except MlAssistError as exc:
        _fail(str(exc))

    def human(p):
        if "submitted" in p:
            click.echo(f"submitted {p['count']} grid experiments")
        else:
            note = " (duplicate)" if p["duplicate"] else ""
            click.echo(f"experiment {p['experiment_id']}{note}")
    _emit(ctx, payload, human)


@main.command()
@click.argument("kind", type=click.Choice(["experiments", "datasets"]))
@click.option("--dataset", "dataset_id", default=None)
@click.option("--status", default=None)
@click.pass_context
def ls(ctx, kind, dataset_id, status):
    """List experiments or datasets."""
    client = _client(ctx)
    try:
        if kind == "datasets":
            payload = client.get("/datasets")
            rows = [[d["id"][:12], d["name"], d["task_type"], d["n_rows"],
                     ",".join(d["tags"])] for d in payload["datasets"]]
            _emit(ctx, payload, lambda p: click.echo(
                _table(rows, ["id", "name", "task", "rows", "tags"]) if rows else "no datasets"))
        else:
            params = {k: v for k, v in [("dataset_id", dataset_id), ("status", status)] if v}
            payload = client.get("/experiments", **params)
            rows = []
            for e in payload["experiments"]:
                metrics = (e.get("result") or {}).get("metrics") or {}
                headline = next(iter(sorted(metrics.items())), ("", ""))
                rows.append([e["id"][:12], e["algorithm"], e["status"], e["launched_by"],
                             f"{headline[0]}={headline[1]:.4f}" if metrics else ""])
            _emit(ctx, payload, lambda p: click.echo(
                _table(rows, ["id", "algorithm", "status", "by", "metric"])
                if rows else "no experiments"))
    except MlAssistError as exc:
        _fail(str(exc))


@main.command()
@click.option("--tags", required=True, help="Comma-separated tags (any match).")
@click.option("--metric", required=True)
@click.option("--limit", default=10, show_default=True)
@click.option("--order", default="desc", type=click.Choice(["asc", "desc"]))
@click.pass_context
def best(ctx, tags, metric, limit, order):
    """Best configurations across runs sharing the given tags."""
    client = _client(ctx)
    try:
        payload = client.get("/best", tags=tags, metric=metric, limit=limit, order=order)
    except MlAssistError as exc:
        _fail(str(exc))
    rows = [[r["algorithm"], json.dumps(r["parameters"], sort_keys=True),
             f"{r['metric_value']:.4f}", r["dataset_id"][:12]]
            for r in payload["results"]]
    _emit(ctx, payload, lambda p: click.echo(
        _table(rows, ["algorithm", "parameters", metric, "dataset"])
        if rows else "no matching runs"))


@main.command()
@click.option("--dataset", "dataset_id", required=True)
@click.option("-n", "count", default=5, show_default=True)
@click.pass_context
def recommend(ctx, dataset_id, count):
    """Ranked algorithm configurations for a dataset."""
    client = _client(ctx)
    try:
        payload = client.get("/recommendations", dataset_id=dataset_id, n=count)
    except MlAssistError as exc:
        _fail(str(exc))
    rows = [[r["rank"], r["algorithm"], json.dumps(r["parameters"], sort_keys=True),
             f"{r['expected_score']:.4f}"] for r in payload["recommendations"]]
    _emit(ctx, payload, lambda p: click.echo(
        _table(rows, ["#", "algorithm", "parameters", "score"]) if rows else "nothing to suggest"))


@main.group()
def ai():
    """Autonomous analysis sessions."""


@ai.command("start")
@click.option("--dataset", "dataset_id", required=True)
@click.option("--max-runs", default=10, show_default=True)
@click.option("--update-every", default=1, show_default=True)
@click.option("--epsilon", default=0.1, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--folds", default=5, show_default=True)
@click.pass_context
def ai_start(ctx, dataset_id, max_runs, update_every, epsilon, seed, folds):
    """Enable the AI on a dataset with a run budget."""
    client = _client(ctx)
    try:
        payload = client.post("/ai/sessions", {
            "dataset_id": dataset_id, "max_runs": max_runs,
            "update_every": update_every, "epsilon": epsilon,
            "seed": seed, "cv_folds": folds, "enabled": True,
        })
    except MlAssistError as exc:
        _fail(str(exc))
    _emit(ctx, payload, lambda p: click.echo(f"ai session {p['session_id']} started"))


@ai.command("toggle")
@click.argument("session_id")
@click.option("--on/--off", "enabled", required=True)
@click.pass_context
def ai_toggle(ctx, session_id, enabled):
    """Turn a session on or off."""
    client = _client(ctx)
    try:
        payload = client.post(f"/ai/sessions/{session_id}/toggle", {"enabled": enabled})
    except MlAssistError as exc:
        _fail(str(exc))
    _emit(ctx, payload, lambda p: click.echo(
        f"session {p['session_id']} {'enabled' if p['enabled'] else 'disabled'}"))


@main.command()
@click.argument("experiment_id")
@click.option("--up/--down", "vote_up", required=True)
@click.pass_context
def feedback(ctx, experiment_id, vote_up):
    """Thumbs up or down on a completed experiment."""
    client = _client(ctx)
    try:
        payload = client.post(f"/experiments/{experiment_id}/feedback",
                              {"vote": "up" if vote_up else "down"})
    except MlAssistError as exc:
        _fail(str(exc))
    _emit(ctx, payload, lambda p: click.echo(f"recorded {p['feedback']} on {p['id']}"))


@main.group()
def report():
    """Result visualizations."""


@report.command("heatmap")
@click.option("--metric", required=True)
@click.option("-o", "output", type=click.Path(), required=True)
@click.pass_context
def report_heatmap(ctx, metric, output):
    """Write the best-metric heatmap (SVG, or JSON with --json)."""
    client = _client(ctx)
    try:
        if ctx.obj["json"] or output.endswith(".json"):
            payload = client.get("/reports/heatmap", metric=metric)
            with open(output, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
        else:
            blob = client.get("/reports/heatmap", metric=metric, format="svg")
            with open(output, "wb") as fh:
                fh.write(blob)
    except MlAssistError as exc:
        _fail(str(exc))
    click.echo(f"wrote {output}")


@report.command("roc")
@click.argument("experiment_id")
@click.option("-o", "output", type=click.Path(), required=True)
@click.pass_context
def report_roc(ctx, experiment_id, output):
    """Write an experiment's ROC curve (CSV or SVG by extension)."""
    client = _client(ctx)
    fmt = "svg" if output.endswith(".svg") else "csv"
    try:
        blob = client.get(f"/experiments/{experiment_id}/roc", format=fmt)
    except MlAssistError as exc:
        _fail(str(exc))
    with open(output, "wb") as fh:
        fh.write(blob if isinstance(blob, bytes) else json.dumps(blob).encode())
    click.echo(f"wrote {output}")


@main.group()
def kb():
    """Knowledge-base management."""


@kb.command("load")
@click.argument("file", type=click.Path(exists=True))
@click.pass_context
def kb_load(ctx, file):
    """Load a tab-delimited benchmark results file into the KB."""
    client = _client(ctx)
    with open(file, "rb") as fh:
        raw = fh.read()
    try:
        payload = client.post("/kb/load", content=raw)
    except MlAssistError as exc:
        _fail(str(exc))
    _emit(ctx, payload, lambda p: click.echo(
        f"loaded {p['loaded']} rows ({len(p['errors'])} malformed), "
        f"kb now has {p['kb_entries']} entries"))


@main.command("export-table")
@click.option("-o", "output", type=click.Path(), required=True)
@click.pass_context
def export_table(ctx, output):
    """Write every experiment as one tab-delimited row."""
    client = _client(ctx)
    try:
        blob = client.get("/reports/results-table")
    except MlAssistError as exc:
        _fail(str(exc))
    with open(output, "wb") as fh:
        fh.write(blob if isinstance(blob, bytes) else blob.encode())
    click.echo(f"wrote {output}")


if __name__ == "__main__":
    main()
