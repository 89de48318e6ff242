#!/usr/bin/env python3
"""Regenerate the bundled toy corpus and embedding table.

30 papers spread over 5 problem domains; within a domain the papers differ
mainly in which mechanism family they build on, so near-problem /
far-mechanism searches have real structure to find. The corpus file also
carries one extra record whose title duplicates another (dedup exercise),
three papers without mechanism tokens (absent-aspect exercise), and the
token "novel" is deliberately missing from the embedding table (OOV
exercise).

Word vectors are built from per-group base directions plus jitter: problem
words of domain d sit near axis d, mechanism words of family f near axis
8+f, and the background/method/findings groups of a domain share its axis
blended with a group axis. Everything is seeded; reruns are byte-stable.
"""

from __future__ import annotations

import json
import pathlib

import numpy as np

DIM = 16
SEED = 2024_07_01
OUT_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "analogy_search" / "data" / "toy"

DOMAINS = [
    {
        "phrase": "Deformable Object Grasping",
        "background": ["robotic", "manipulation", "industrial", "automation"],
        "problem": ["grasping", "deformable", "objects", "damage"],
        "extras": ["vision", "tactile", "cluttered", "bins", "fragile", "soft"],
        "method": ["gripper", "controller", "simulation", "transfer"],
        "findings": ["grasp", "success", "household", "items"],
    },
    {
        "phrase": "Protein Structure Prediction",
        "background": ["molecular", "biology", "genomics", "sequencing"],
        "problem": ["protein", "folding", "structure", "prediction"],
        "extras": ["membrane", "complexes", "disordered", "homologs", "ligands", "motifs"],
        "method": ["potentials", "minimization", "sampling", "refinement"],
        "findings": ["accuracy", "gains", "benchmark", "targets"],
    },
    {
        "phrase": "Urban Traffic Routing",
        "background": ["transportation", "networks", "cities", "commuting"],
        "problem": ["traffic", "congestion", "routing", "urban"],
        "extras": ["peak", "incidents", "transit", "freight", "pedestrians", "parking"],
        "method": ["signal", "timing", "flow", "scheduling"],
        "findings": ["delay", "reduction", "intersections", "throughput"],
    },
    {
        "phrase": "Battery Capacity Fade",
        "background": ["energy", "storage", "electric", "vehicles"],
        "problem": ["battery", "degradation", "capacity", "fade"],
        "extras": ["anode", "cathode", "thermal", "fast", "charging", "impedance"],
        "method": ["electrolyte", "additives", "cycling", "protocols"],
        "findings": ["lifetime", "extension", "cells", "retention"],
    },
    {
        "phrase": "Algebra Misconception Tutoring",
        "background": ["education", "classrooms", "curricula", "assessment"],
        "problem": ["student", "misconceptions", "algebra", "learning"],
        "extras": ["fractions", "equations", "word", "problems", "graphs", "proofs"],
        "method": ["hints", "feedback", "exercises", "adaptation"],
        "findings": ["mastery", "improvement", "practice", "scores"],
    },
]

MECHANISMS = [
    {"phrase": "Reinforcement Learning", "words": ["reinforcement", "reward", "policy", "exploration"]},
    {"phrase": "Evolutionary Search", "words": ["evolutionary", "mutation", "population", "crossover"]},
    {"phrase": "Graph Algorithms", "words": ["graph", "shortest", "paths", "partitioning"]},
    {"phrase": "Attention Models", "words": ["attention", "transformer", "pretraining", "embeddings"]},
    {"phrase": "Crowdsourced Annotation", "words": ["crowdsourcing", "workers", "consensus", "annotation"]},
]

GLUE = {
    "background": (["research", "on"], ["is", "growing"]),
    "problem": (["however", "novel"], ["remains", "difficult"]),
    "mechanism": (["we", "build", "on"], []),
    "method": (["our", "approach", "uses"], []),
    "findings": (["experiments", "show"], ["improvements"]),
}
OOV_WORDS = {"novel"}  # present in text, absent from the embedding table

# papers that carry no mechanism segment at all
NO_MECHANISM = {"toy0004", "toy0016", "toy0028"}


def group_vectors(rng: np.random.Generator) -> dict[str, np.ndarray]:
    """word -> unit vector; group base + jitter, normalized."""
    axis = {}

    def base(*weights: tuple[int, float]) -> np.ndarray:
        v = np.zeros(DIM)
        for ax, w in weights:
            v[ax] = w
        return v / np.linalg.norm(v)

    for d, domain in enumerate(DOMAINS):
        axis.update({w: base((d, 1.0)) for w in domain["problem"] + domain["extras"]})
        axis.update({w: base((d, 1.0), (5, 0.9)) for w in domain["background"]})
        axis.update({w: base((d, 1.0), (6, 0.9)) for w in domain["method"]})
        axis.update({w: base((d, 1.0), (7, 0.9)) for w in domain["findings"]})
    for f, mech in enumerate(MECHANISMS):
        axis.update({w: base((8 + f, 1.0)) for w in mech["words"]})
    glue_words = {w for pre, post in GLUE.values() for w in pre + post}
    axis.update({w: base((13, 1.0), (14, 0.8)) for w in glue_words})

    vectors = {}
    for word, direction in sorted(axis.items()):
        if word in OOV_WORDS:
            continue
        v = direction + 0.12 * rng.standard_normal(DIM)
        vectors[word] = v / np.linalg.norm(v)
    return vectors


def segment(kind: str, core: list[str]) -> list[str]:
    pre, post = GLUE[kind]
    return [*pre, *core, *post]


def make_record(i: int) -> dict:
    d, j = divmod(i, 6)
    domain = DOMAINS[d]
    mech = MECHANISMS[(d + j) % 5]
    pid = f"toy{i:04d}"
    extra = domain["extras"][j]

    segments = {
        "background": segment("background", domain["background"]),
        "problem": segment("problem", domain["problem"] + [extra]),
        "mechanism": segment("mechanism", mech["words"]),
        "method": segment("method", domain["method"] + [mech["words"][0]]),
        "findings": segment("findings", domain["findings"]),
    }
    if pid in NO_MECHANISM:
        del segments["mechanism"]
        segments["method"] = segment("method", domain["method"])

    order = [k for k in ("background", "problem", "mechanism", "method", "findings") if k in segments]
    abstract_tokens = [tok for k in order for tok in segments[k]]
    record = {
        "paper_id": pid,
        "title": f"{mech['phrase']} for {domain['phrase']} under {extra.capitalize()} Conditions",
        "raw_abstract": " ".join(abstract_tokens),
        "abstract_tokens": abstract_tokens,
        "background_tokens": segments["background"],
        "problem_tokens": segments["problem"],
        "method_tokens": segments["method"],
        "findings_tokens": segments["findings"],
    }
    if "mechanism" in segments:
        record["mechanism_tokens"] = segments["mechanism"]
    if i % 2 == 0:
        record["big_problem_tokens"] = domain["problem"][:2]
    return record


def make_duplicate(of: dict) -> dict:
    """Same title up to case/punctuation, fewer tokens: dedup must drop it."""
    return {
        "paper_id": "toy0030",
        "title": of["title"].lower() + "!",
        "raw_abstract": " ".join(of["background_tokens"] + of["problem_tokens"]),
        "abstract_tokens": of["background_tokens"] + of["problem_tokens"],
        "background_tokens": of["background_tokens"],
        "problem_tokens": of["problem_tokens"],
    }


def main() -> None:
    rng = np.random.default_rng(SEED)
    OUT_DIR.mkdir(parents=True, exist_ok=True)

    records = [make_record(i) for i in range(30)]
    records.append(make_duplicate(records[5]))
    with open(OUT_DIR / "corpus.jsonl", "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")

    vectors = group_vectors(rng)
    with open(OUT_DIR / "embeddings.txt", "w", encoding="utf-8") as fh:
        for word, v in vectors.items():
            coords = " ".join(repr(float(x)) for x in v)
            fh.write(f"{word} {coords}\n")

    # sanity: the bundle must build into the index the tests expect
    from analogy_search.corpus import Aspect, build_index, ingest_corpus
    from analogy_search.embeddings import load_embedding_table

    with open(OUT_DIR / "corpus.jsonl", encoding="utf-8") as fh:
        parsed = ingest_corpus(fh)
    with open(OUT_DIR / "embeddings.txt", encoding="utf-8") as fh:
        table = load_embedding_table(fh)
    index, dedup = build_index(parsed, table)
    coverage = index.aspect_coverage()
    assert len(index.ids()) == 30, len(index.ids())
    assert len(dedup.pairs) == 1, dedup.pairs
    assert coverage[Aspect.MECHANISM] == 27, coverage
    print(f"wrote {OUT_DIR}: 30 papers, {len(vectors)} embedded words, dim {DIM}")
    print("coverage:", {a.value: n for a, n in sorted(coverage.items())})


if __name__ == "__main__":
    main()
