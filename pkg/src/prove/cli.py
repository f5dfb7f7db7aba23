"""Command-line entry point.

Subcommands: ``verify`` (one triple against one source), ``evaluate`` (a
dataset against its annotations), ``train`` (the aggregation classifier) and
``extract`` (segment/passage dump for one source). Machine-readable JSON goes
to stdout; human summaries go to stderr.

Exit codes: 0 success, 2 source unavailable, 3 backend protocol failure,
4 invalid input or configuration.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import evaluation
from .backends import BackendError
from .config import (
    CliConfig,
    build_backend,
    parse_window_sizes,
    resolve_config,
)
from .core import (
    ProveError,
    Reference,
    Triple,
    TripleComponent,
)
from .forest import ForestConfig, RandomForest
from .pipeline import AGGREGATORS, PipelineConfig, report_to_dict, resolve_reference, verify_pair
from .retrieval import (
    FetchTimeout,
    NotHtml,
    Unavailable,
    WindowConfig,
    clean_html,
    segment as segment_text,
    window as window_segments,
)
from .verbalisation import LabelPolicy
from .verification import load_feature_file, train_aggregation_model

EXIT_UNAVAILABLE = 2
EXIT_BACKEND = 3
EXIT_INVALID = 4

# CLI misuse is an input validation failure, same as bad domain input.
click.UsageError.exit_code = EXIT_INVALID


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guard(func):
    """Map domain errors onto the documented exit codes."""

    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (Unavailable, NotHtml, FetchTimeout) as exc:
            _fail(EXIT_UNAVAILABLE, str(exc))
        except BackendError as exc:
            _fail(EXIT_BACKEND, str(exc))
        except ProveError as exc:
            _fail(EXIT_INVALID, str(exc))

    wrapper.__name__ = func.__name__
    wrapper.__doc__ = func.__doc__
    return wrapper


def _load_triple(path: str) -> Triple:
    try:
        payload = json.loads(Path(path).read_text("utf-8"))
    except (OSError, ValueError) as exc:
        raise ProveError(f"cannot read triple file {path}: {exc}") from exc

    def component(key: str) -> TripleComponent:
        entry = payload.get(key)
        if not isinstance(entry, dict):
            raise ProveError(f"triple file {path} is missing {key!r}")
        return TripleComponent(
            id=str(entry.get("id", key)),
            main_label=str(entry.get("label", "")),
            aliases=tuple(entry.get("aliases", ())),
            description=entry.get("description"),
        )

    return Triple(
        id=str(payload.get("id", "triple")),
        subject=component("subject"),
        predicate=component("predicate"),
        object=component("object"),
        object_datatype=str(payload.get("object_datatype", "entity")),
    )


def _inline_triple(subject: str | None, predicate: str | None, object_: str | None,
                   datatype: str) -> Triple:
    if not (subject and predicate and object_):
        raise ProveError(
            "provide --triple FILE or all of --subject/--predicate/--object"
        )
    return Triple(
        id="inline",
        subject=TripleComponent(id="subject", main_label=subject),
        predicate=TripleComponent(id="predicate", main_label=predicate),
        object=TripleComponent(id="object", main_label=object_),
        object_datatype=datatype,
    )


def _reference_from_options(url: str | None, html: str | None, text: str | None,
                            offline: bool, timeout_ms: int) -> Reference:
    chosen = [opt for opt in (url, html, text) if opt]
    if len(chosen) != 1:
        raise ProveError("provide exactly one of --url, --html or --text")
    if url:
        if offline and not url.startswith("file:"):
            raise ProveError(f"offline mode refuses to fetch {url!r}")
        return resolve_reference(
            Reference(id=url, source_kind="url", source_value=url),
            timeout_ms=timeout_ms,
        )
    if html:
        content = Path(html).read_text("utf-8")
        return Reference(
            id=html, source_kind="url", source_value=f"file:{html}",
            final_url=f"file:{html}", html=content,
        )
    assert text is not None
    return Reference(id=text, source_kind="document", source_value=Path(text).read_text("utf-8"))


def _common_config(config_file: str | None, **flags) -> CliConfig:
    try:
        return resolve_config(config_file, flags)
    except OSError as exc:
        raise ProveError(f"cannot read config file: {exc}") from exc


def _aggregators(choice: str) -> tuple[str, ...]:
    return AGGREGATORS if choice == "all" else (choice,)


@click.group()
def main() -> None:
    """Check whether referenced sources textually support knowledge-graph triples."""


@main.command()
@click.option("--triple", "triple_path", type=click.Path(), help="Triple JSON file.")
@click.option("--subject", help="Subject label (inline triple).")
@click.option("--predicate", help="Predicate label (inline triple).")
@click.option("--object", "object_", help="Object label (inline triple).")
@click.option("--object-datatype", default="entity", show_default=True,
              type=click.Choice(["entity", "string", "quantity", "datetime"]))
@click.option("--url", help="Reference URL (http(s) or file:).")
@click.option("--html", "html_path", type=click.Path(), help="Local HTML file.")
@click.option("--text", "text_path", type=click.Path(), help="Local plain-text document.")
@click.option("--aggregator", default=None,
              type=click.Choice(list(AGGREGATORS) + ["all"]))
@click.option("--model", "model_path", type=click.Path(), default=None,
              help="Trained aggregation model (for the classifier).")
@click.option("--windows", default=None, help="Comma-separated window sizes.")
@click.option("--k", "evidence_k", type=int, default=None, help="Evidence set size.")
@click.option("--backend-url", default=None, help="Remote scorer endpoint (empty = baseline).")
@click.option("--timeout-ms", type=int, default=None)
@click.option("--labels-override", type=click.Path(), default=None,
              help="component_id<TAB>alias label override file.")
@click.option("--verbalisation", "verbalisation_override", default=None,
              help="Skip the backend and use this sentence as the claim.")
@click.option("--offline", is_flag=True, default=None)
@click.option("--config", "config_file", type=click.Path(exists=True), default=None)
@_guard
def verify(triple_path, subject, predicate, object_, object_datatype, url, html_path,
           text_path, aggregator, model_path, windows, evidence_k, backend_url,
           timeout_ms, labels_override, verbalisation_override, offline, config_file):
    """Verify one triple against one referenced source."""
    config = _common_config(
        config_file,
        backend_url=backend_url,
        timeout_ms=timeout_ms,
        evidence_k=evidence_k,
        aggregator=aggregator,
        model_path=model_path,
        offline=offline,
        window_sizes=parse_window_sizes(windows) if windows else None,
    )
    backend = build_backend(config)
    triple = (
        _load_triple(triple_path)
        if triple_path
        else _inline_triple(subject, predicate, object_, object_datatype)
    )
    reference = _reference_from_options(
        url, html_path, text_path, config.offline, config.timeout_ms
    )
    aggregators = _aggregators(config.aggregator)
    model = None
    if "classifier" in aggregators:
        if not config.model_path:
            raise ProveError(
                "the classifier aggregator needs --model (train one with 'prove train')"
            )
        model = RandomForest.load(config.model_path)
    policy = LabelPolicy.from_file(labels_override) if labels_override else LabelPolicy()
    pipeline_config = PipelineConfig(
        window_sizes=config.window_sizes,
        evidence_k=config.evidence_k,
        aggregators=aggregators,
        label_policy=policy,
        verbalisation_override=verbalisation_override,
    )
    result = verify_pair(triple, reference, backend, pipeline_config, model=model)
    click.echo(json.dumps(report_to_dict(result, aggregators), indent=2, sort_keys=True))

    primary = result.results[aggregators[0]]
    click.echo(
        f"claim: {result.verbalisation.text}\n"
        f"verdict[{aggregators[0]}]: {primary.final_class} "
        f"(support probability {primary.normalized_support:.3f}, "
        f"{len(result.evidence)} evidence)",
        err=True,
    )


@main.command()
@click.argument("dataset", type=click.Path())
@click.option("--out", "out_dir", type=click.Path(), required=True,
              help="Directory for evaluation.json, tables.txt, per_record.csv.")
@click.option("--aggregator", default="all",
              type=click.Choice(list(AGGREGATORS) + ["all"]))
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--jobs", type=int, default=None)
@click.option("--windows", default=None)
@click.option("--k", "evidence_k", type=int, default=None)
@click.option("--backend-url", default=None)
@click.option("--timeout-ms", type=int, default=None)
@click.option("--offline", is_flag=True, default=None)
@click.option("--config", "config_file", type=click.Path(exists=True), default=None)
@_guard
def evaluate(dataset, out_dir, aggregator, folds, seed, jobs, windows, evidence_k,
             backend_url, timeout_ms, offline, config_file):
    """Evaluate the pipeline on an annotated dataset (stored html, no refetch)."""
    config = _common_config(
        config_file,
        backend_url=backend_url,
        timeout_ms=timeout_ms,
        evidence_k=evidence_k,
        seed=seed,
        jobs=jobs,
        offline=offline,
        window_sizes=parse_window_sizes(windows) if windows else None,
    )
    backend = build_backend(config)
    if not Path(dataset).exists():
        raise ProveError(f"no such dataset: {dataset}")
    records = evaluation.load_wtr(dataset)
    eval_config = evaluation.EvaluationConfig(
        aggregators=_aggregators(aggregator),
        window_sizes=config.window_sizes,
        evidence_k=config.evidence_k,
        folds=folds,
        seed=config.seed,
        jobs=config.jobs,
    )
    bundle = evaluation.evaluate_pipeline(records, backend, eval_config)
    paths = evaluation.write_reports(bundle, out_dir)
    click.echo(evaluation.render_aggregation_table(bundle), err=True)
    click.echo(json.dumps({"written": {k: str(v) for k, v in paths.items()}}, indent=2))


@main.command()
@click.argument("dataset", type=click.Path())
@click.option("--out", "model_out", type=click.Path(), required=True,
              help="Where to write the trained model file.")
@click.option("--report", "report_out", type=click.Path(), default=None,
              help="Where to write the cross-validation report JSON.")
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--trees", type=int, default=None, help="Forest size override.")
@click.option("--depth", type=int, default=None, help="Tree depth override.")
@click.option("--backend-url", default=None)
@click.option("--timeout-ms", type=int, default=None)
@click.option("--offline", is_flag=True, default=None)
@click.option("--config", "config_file", type=click.Path(exists=True), default=None)
@_guard
def train(dataset, model_out, report_out, folds, seed, trees, depth, backend_url,
          timeout_ms, offline, config_file):
    """Train the aggregation classifier on WTR records or a feature file."""
    config = _common_config(
        config_file,
        backend_url=backend_url,
        timeout_ms=timeout_ms,
        seed=seed,
        offline=offline,
    )
    if not Path(dataset).exists():
        raise ProveError(f"no such dataset: {dataset}")
    first_line = ""
    with open(dataset, encoding="utf-8") as handle:
        first_line = handle.readline()
    try:
        header = json.loads(first_line) if first_line.strip() else {}
    except ValueError:
        header = {}
    if header.get("schema") == evaluation.SCHEMA_NAME:
        backend = build_backend(config)
        records = evaluation.load_wtr(dataset)
        samples = evaluation.features_from_records(records, backend)
    else:
        samples = load_feature_file(dataset)

    forest_config = ForestConfig(
        n_trees=trees if trees is not None else ForestConfig.n_trees,
        max_depth=depth if depth is not None else ForestConfig.max_depth,
    )
    model, report = train_aggregation_model(
        samples, folds=folds, seed=config.seed, config=forest_config
    )
    model.save(model_out)
    if report_out:
        Path(report_out).write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", "utf-8"
        )
    click.echo(json.dumps({
        "model": str(model_out),
        "samples": len(samples),
        "folds": len(report.folds),
        "mean_ternary_accuracy": report.mean_ternary_accuracy,
        "mean_binary_accuracy": report.mean_binary_accuracy,
    }, indent=2, sort_keys=True))


@main.command()
@click.option("--url", help="Reference URL (http(s) or file:).")
@click.option("--html", "html_path", type=click.Path(), help="Local HTML file.")
@click.option("--text", "text_path", type=click.Path(), help="Local plain-text document.")
@click.option("--windows", default=None, help="Comma-separated window sizes.")
@click.option("--timeout-ms", type=int, default=None)
@click.option("--offline", is_flag=True, default=None)
@click.option("--config", "config_file", type=click.Path(exists=True), default=None)
@_guard
def extract(url, html_path, text_path, windows, timeout_ms, offline, config_file):
    """Dump the segments and windowed passages extracted from one source."""
    config = _common_config(
        config_file,
        timeout_ms=timeout_ms,
        offline=offline,
        window_sizes=parse_window_sizes(windows) if windows else None,
    )
    reference = _reference_from_options(
        url, html_path, text_path, config.offline, config.timeout_ms
    )
    if reference.source_kind == "document":
        segments = segment_text(reference.source_value)
    else:
        segments = segment_text(clean_html(reference.html or ""))
    passages = window_segments(segments, WindowConfig(sizes=config.window_sizes))
    click.echo(json.dumps({
        "schema_version": 1,
        "segments": list(segments.segments),
        "passages": [
            {
                "window_size": p.window_size,
                "start_index": p.start_index,
                "end_index": p.end_index,
                "text": p.text,
            }
            for p in passages
        ],
    }, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
