"""Command line front door.

Subcommands cover the whole workflow: build an index from a corpus and an
embedding table, query it with any of the ranking algorithms, create blind
A/B sessions, print evaluation reports, and serve the HTTP API. Commands
add no logic of their own; output always matches the library calls.
"""

from __future__ import annotations

import functools
import json
import time
from typing import Optional

import click

from .corpus import (
    Aspect,
    build_index,
    ingest_corpus,
    load_index_file,
    resolve_aspect,
    save_index,
)
from .embeddings import load_embedding_table
from .errors import AnalogySearchError
from .evaluation import TesInput, VoteStore, aggregate_votes, report_to_dict, tes_score
from .ranking import SearchConfig, run_search
from .sessions import SessionStore, client_view


def domain_errors(fn):
    """Expected failures exit nonzero with the module's message."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except AnalogySearchError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def config_options(fn):
    """Flags mirroring SearchConfig, shared by search and ab-session."""
    for option in reversed([
        click.option("--algorithm", default="KnnKmeans", show_default=True,
                      help="NaiveCosine, KnnKmeans, NaiveFarthest, "
                           "FarthestNeighbor, or LexicalBaseline"),
        click.option("--near", multiple=True, metavar="ASPECT[:WEIGHT]",
                      help="near aspect, repeatable; weight defaults to 1"),
        click.option("--far", default=None, metavar="ASPECT"),
        click.option("--pool-size", type=int, default=None),
        click.option("--result-size", type=int, default=None),
        click.option("--k-clusters", type=int, default=None),
        click.option("--reduce-mode", default=None,
                      help="NearestToQuery or NearestToCentroid"),
        click.option("--seed", type=int, default=None,
                      help="RNG seed for clustering and selection"),
        click.option("--purpose-aspect", default="problem",
                      type=click.Choice(["problem", "big_problem"]),
                      show_default=True,
                      help="which aspect the 'purpose' alias names"),
    ]):
        fn = option(fn)
    return fn


def _config_from_flags(
    algorithm: str,
    near: tuple[str, ...],
    far: Optional[str],
    pool_size: Optional[int],
    result_size: Optional[int],
    k_clusters: Optional[int],
    reduce_mode: Optional[str],
    seed: Optional[int],
    purpose_aspect: str,
) -> SearchConfig:
    obj: dict = {"algorithm": algorithm}
    if near:
        pairs = []
        for raw in near:
            name, sep, weight = raw.partition(":")
            try:
                pairs.append([name, float(weight) if sep else 1.0])
            except ValueError:
                raise click.ClickException(
                    f"--near takes ASPECT[:WEIGHT], got {raw!r}"
                ) from None
        obj["near_aspects"] = pairs
    if far is not None:
        obj["far_aspect"] = far
    if pool_size is not None:
        obj["pool_size"] = pool_size
    if result_size is not None:
        obj["result_size"] = result_size
    if k_clusters is not None:
        obj["k_clusters"] = k_clusters
    if reduce_mode is not None:
        obj["reduce_mode"] = reduce_mode
    if seed is not None:
        obj["rng_seed"] = seed
    return SearchConfig.from_dict(obj, purpose_aspect=resolve_aspect(purpose_aspect))


@click.group()
def main() -> None:
    """Segment-aware analogy search over a paper corpus."""


@main.command("build-index")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.argument("embeddings", type=click.Path(exists=True, dir_okay=False))
@click.argument("out", type=click.Path(dir_okay=False, writable=True))
@domain_errors
def build_index_cmd(corpus: str, embeddings: str, out: str) -> None:
    """Ingest CORPUS, drop duplicate titles, vectorize, write OUT."""
    with open(corpus, encoding="utf-8") as fh:
        records = ingest_corpus(fh)
    with open(embeddings, encoding="utf-8") as fh:
        table = load_embedding_table(fh)
    index, dedup = build_index(records, table)
    pair_word = "pair" if len(dedup.pairs) == 1 else "pairs"
    click.echo(f"{len(index.ids())} papers, {len(dedup.pairs)} dedup {pair_word}")
    for dropped, retained in dedup.pairs:
        click.echo(f"  dropped {dropped} (duplicate title of {retained})")
    coverage = index.aspect_coverage()
    click.echo("coverage: " + " ".join(
        f"{aspect.value}={coverage.get(aspect, 0)}" for aspect in Aspect
    ))
    with open(out, "wb") as fh:
        save_index(index, fh)
    click.echo(f"wrote {out} (dim {index.dim})")


@main.command("search")
@click.argument("index_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("query_id")
@config_options
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
@domain_errors
def search_cmd(index_path: str, query_id: str, as_json: bool, **flags) -> None:
    """Rank papers against QUERY_ID with the configured algorithm."""
    config = _config_from_flags(**flags)
    index = load_index_file(index_path)
    results = run_search(index, query_id, config)
    if as_json:
        click.echo(json.dumps({
            "query_id": query_id,
            "config": config.to_dict(),
            "results": [
                {"paper_id": r.paper_id, "title": index.record(r.paper_id).title,
                 "score": r.score}
                for r in results
            ],
        }))
        return
    for rank, item in enumerate(results, start=1):
        title = index.record(item.paper_id).title
        click.echo(f"{rank:2d}. {item.paper_id}  {item.score:.6f}  {title}")
    if not results:
        click.echo("no results")


@main.command("ab-session")
@click.argument("index_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("seed_paper_id")
@config_options
@click.option("--interleave-seed", type=int, default=0, show_default=True,
              help="seed for the presentation-order draw")
@click.option("--sessions-file", default="sessions.jsonl", show_default=True,
              type=click.Path(dir_okay=False, writable=True))
@domain_errors
def ab_session_cmd(
    index_path: str,
    seed_paper_id: str,
    interleave_seed: int,
    sessions_file: str,
    **flags,
) -> None:
    """Create (or fetch) a blind A/B session and print the client view."""
    config = _config_from_flags(**flags)
    index = load_index_file(index_path)
    store = SessionStore(sessions_file, index)
    session = store.create(seed_paper_id, config, interleave_seed, time.time())
    click.echo(json.dumps(client_view(session, index), indent=2))


@main.group("report")
def report_group() -> None:
    """Evaluation reports."""


@report_group.command("aggregate")
@click.argument("index_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("votes_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def report_aggregate_cmd(index_path: str, votes_file: str, as_json: bool) -> None:
    """Per-engine vote percentages and AS-vs-ES changes."""
    index = load_index_file(index_path)
    report = aggregate_votes(VoteStore(votes_file, index).load_points())
    if as_json:
        click.echo(json.dumps(report_to_dict(report)))
        return
    for name, stats in report.engines.items():
        click.echo(f"{name}: {stats.total} votes")
        for label, pct in (("usefulness", stats.usefulness_pct),
                           ("interestingness", stats.interestingness_pct)):
            cells = "  ".join(f"{k} {v}%" for k, v in pct.items())
            click.echo(f"  {label}: {cells}")
    for label, change in (("usefulness", report.usefulness_change),
                          ("interestingness", report.interestingness_change)):
        if change is not None:
            cells = "  ".join(f"{k} {v:+d}%" for k, v in change.items())
            click.echo(f"change ({label}, AS vs ES): {cells}")


@report_group.command("tes")
@click.argument("tallies", nargs=-1, required=True, metavar="ALPHA:BETA:N...")
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def report_tes_cmd(tallies: tuple[str, ...], as_json: bool) -> None:
    """Task effectiveness scores from correct/incorrect tallies."""
    scores = []
    for raw in tallies:
        parts = raw.split(":")
        if len(parts) != 3:
            raise click.ClickException(
                f"tallies look like ALPHA:BETA:N, got {raw!r}"
            )
        try:
            alpha, beta, n = (int(p) for p in parts)
        except ValueError:
            raise click.ClickException(f"non-integer tally in {raw!r}") from None
        scores.append((alpha, beta, n, tes_score(TesInput(alpha, beta, n))))
    if as_json:
        click.echo(json.dumps({
            "scores": [
                {"alpha": a, "beta": b, "n": n, "tes": t} for a, b, n, t in scores
            ]
        }))
        return
    for alpha, beta, n, score in scores:
        click.echo(f"alpha={alpha} beta={beta} n={n} tes={score}")


@main.command("serve")
@click.argument("index_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--votes-file", default="votes.jsonl", show_default=True,
              type=click.Path(dir_okay=False, writable=True))
@click.option("--sessions-file", default="sessions.jsonl", show_default=True,
              type=click.Path(dir_okay=False, writable=True))
@click.option("--frontend-dist", default=None,
              type=click.Path(file_okay=False),
              help="static UI bundle to serve at /")
@domain_errors
def serve_cmd(
    index_path: str,
    host: str,
    port: int,
    votes_file: str,
    sessions_file: str,
    frontend_dist: Optional[str],
) -> None:
    """Serve the HTTP API (and optionally the web UI)."""
    import uvicorn

    from .service import build_app

    app = build_app(index_path, votes_file, sessions_file, frontend_dist)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
