"""Command line front: one-shot questions, an interactive loop, and the
HTTP service."""

from __future__ import annotations

import json
import sys
from datetime import datetime, timezone

import click

from .catalog import CatalogStore, load_catalog
from .config import AppConfig, default_category_keywords, load_bundled_catalog
from .errors import ClientError, NoMetricFoundError
from .pipeline import PipelineAnswer, SmartDiscoveryService, answer_to_dict
from .promclient import FixtureClient, PrometheusClient


def _build_service(cfg: AppConfig) -> SmartDiscoveryService:
    if cfg.catalog_path:
        with open(cfg.catalog_path, encoding="utf-8") as fh:
            catalog = load_catalog(fh.read(), default_category_keywords())
    else:
        catalog = load_bundled_catalog()
    client = None
    if cfg.fixtures_dir:
        client = FixtureClient(cfg.fixtures_dir)
    elif cfg.prometheus_url:
        client = PrometheusClient(cfg.prometheus_url, token=cfg.token, timeout=cfg.timeout)
    return SmartDiscoveryService(
        CatalogStore(catalog),
        client,
        vendor_prefixes=cfg.vendor_prefixes(),
        default_window=cfg.default_window,
        calendar_day_boundaries=cfg.calendar_day_boundaries,
    )


def _parse_range(text: str | None) -> tuple[float, float] | None:
    """A ``start,end`` unix pair becomes an explicit window; anything else
    is left for the temporal resolver to read from the question."""
    if not text:
        return None
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 2:
        try:
            return float(parts[0]), float(parts[1])
        except ValueError:
            pass
    raise click.BadParameter("expected 'start,end' as unix timestamps")


def _ts(value: int) -> str:
    return datetime.fromtimestamp(value, tz=timezone.utc).strftime("%Y-%m-%d %H:%M:%SZ")


def _print_answer(answer: PipelineAnswer) -> None:
    sel = answer.selection
    e = sel.entry
    click.echo(f"PromQL    {answer.query.query}")
    click.echo(f"Metric    {e.name} ({e.metric_type.value}, {e.priority.value}, {e.category})")
    click.echo(
        f"Score     {sel.s_total} = keyword {sel.s_keyword} + type {sel.s_type}"
        f" + specificity {sel.s_specificity} + priority {sel.s_priority}"
    )
    triggers = ", ".join(answer.intent.matched_triggers) or "none"
    click.echo(f"Intent    {answer.intent.intent.value} (triggers: {triggers})")
    click.echo(
        f"Window    {_ts(answer.time.start)} .. {_ts(answer.time.end)} "
        f"{answer.time.rate_syntax} ({answer.time.strategy.value})"
    )
    click.echo(f"Path      {answer.path.value}")
    if answer.query.repairs:
        click.echo(f"Repairs   {', '.join(r.value for r in answer.query.repairs)}")
    if answer.alternatives:
        alts = ", ".join(f"{s.entry.name}={s.s_total}" for s in answer.alternatives)
        click.echo(f"Also      {alts}")
    if answer.execution is not None:
        click.echo(f"Result    {answer.execution.result_type}, {len(answer.execution.series)} series")
        for series in answer.execution.series[:5]:
            labels = ", ".join(f"{k}={v}" for k, v in series.labels)
            last = series.samples[-1] if series.samples else None
            shown = f"{last[1]} @ {_ts(int(last[0]))}" if last else "no samples"
            click.echo(f"          {{{labels}}} {shown}")
    if answer.execution_error:
        click.echo(f"Error     {answer.execution_error}", err=True)


@click.group()
@click.option("--prometheus-url", envvar="PROMETHEUS_URL", default=None, help="Query backend base URL.")
@click.option("--token", envvar="PROMETHEUS_TOKEN", default=None, help="Bearer token for the backend.")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Catalog JSON file (defaults to the bundled GPU catalog).")
@click.option("--fixtures", "fixtures_dir", type=click.Path(exists=True, file_okay=False), default=None, help="Replay recorded API responses from this directory instead of a live backend.")
@click.option("--default-window", type=int, default=3600, show_default=True, help="Fallback window in seconds when the question names no time range.")
@click.option("--calendar-days", is_flag=True, help="Snap 'yesterday' to midnight boundaries instead of the trailing 24 hours.")
@click.pass_context
def main(ctx, prometheus_url, token, catalog_path, fixtures_dir, default_window, calendar_days):
    """Translate natural language observability questions into PromQL."""
    ctx.obj = AppConfig(
        prometheus_url=prometheus_url,
        token=token,
        catalog_path=catalog_path,
        fixtures_dir=fixtures_dir,
        default_window=default_window,
        calendar_day_boundaries=calendar_days,
    )


@main.command()
@click.argument("question", nargs=-1, required=True)
@click.option("--execute", is_flag=True, help="Run the generated query against the backend.")
@click.option("--json", "as_json", is_flag=True, help="Print the full answer as JSON.")
@click.option("--range", "range_text", default=None, help="Explicit window as 'start,end' unix timestamps.")
@click.option("--now", type=float, default=None, help="Reference timestamp for time resolution (unix seconds).")
@click.pass_obj
def ask(cfg: AppConfig, question, execute, as_json, range_text, now):
    """Answer one question and print the generated PromQL."""
    service = _build_service(cfg)
    text = " ".join(question)
    try:
        answer = service.smart_discover(
            text,
            explicit_range=_parse_range(range_text),
            execute=execute,
            now=now,
        )
    except (NoMetricFoundError, ClientError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc
    if as_json:
        click.echo(json.dumps(answer_to_dict(answer), indent=2))
    else:
        _print_answer(answer)


_REPL_HELP = """Commands:
  :help            show this help
  :execute on|off  toggle running queries against the backend
  :json on|off     toggle JSON output
  :quit            leave the loop
Anything else is treated as a question."""


@main.command()
@click.pass_obj
def repl(cfg: AppConfig):
    """Interactive question loop."""
    try:
        import readline  # noqa: F401  (line editing when available)
    except ImportError:
        pass
    service = _build_service(cfg)
    execute = False
    as_json = False
    click.echo("Ask about your metrics. :help for commands, :quit to leave.")
    while True:
        try:
            line = input("nl2promql> ").strip()
        except (EOFError, KeyboardInterrupt):
            click.echo("")
            break
        if not line:
            continue
        if line.startswith(":"):
            parts = line.split()
            cmd = parts[0].lower()
            if cmd in (":quit", ":q", ":exit"):
                break
            if cmd == ":help":
                click.echo(_REPL_HELP)
            elif cmd == ":execute" and len(parts) == 2 and parts[1] in ("on", "off"):
                execute = parts[1] == "on"
                click.echo(f"execute {'on' if execute else 'off'}")
            elif cmd == ":json" and len(parts) == 2 and parts[1] in ("on", "off"):
                as_json = parts[1] == "on"
                click.echo(f"json {'on' if as_json else 'off'}")
            else:
                click.echo(f"unknown command {line!r}; :help lists commands")
            continue
        try:
            answer = service.smart_discover(line, execute=execute)
        except (NoMetricFoundError, ClientError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            continue
        if as_json:
            click.echo(json.dumps(answer_to_dict(answer), indent=2))
        else:
            _print_answer(answer)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.pass_obj
def serve(cfg: AppConfig, host, port):
    """Run the JSON-RPC tool service over HTTP."""
    import uvicorn

    from .webapp import create_app

    service = _build_service(cfg)
    if service.client is not None:
        service.start_background()
    else:
        # Nothing to discover against; mark the probe ready immediately.
        service.gpu_done.set()
        service.validation_done.set()
    uvicorn.run(create_app(service), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    sys.exit(main())
