#!/usr/bin/env python3
"""Regenerates the bundled sample data and test fixtures.

Everything is seeded, so running this twice gives identical files.
The expected report is counted here in plain Python, separately from the
C++ statistics code, and committed next to the corpus.
"""
import argparse
import json
import math
import random
from collections import OrderedDict
from pathlib import Path

SEED = 20231

VENUES = ["EMNLP"] * 8 + ["ACL"] * 6 + ["NAACL"] * 4 + ["COLING"] * 3 + ["EACL", "AAAI", "SIGIR", "TACL",
                                                                        "CIKM", "NeurIPS", "ECIR", "AACL", "IJCAI"]
GROUP_TAGS = {
    "document_representation": ["input_encoding", "unit_relationship", "data_augmentation", "external_knowledge"],
    "model_training": ["learning_paradigm", "objective_function", "auxiliary_tasks"],
    "summary_generation": ["unit_selection", "controlled_generation", "post_processing"],
}
PAPER_TYPES = ["method", "analysis", "metric", "dataset", "theory"]
PARADIGMS = ["supervised", "unsupervised", "reinforcement"]
DOMAINS = ["News", "Scientific", "Dialogue", "Legal", "Medical", "Reviews", "Wikipedia"]
DATASETS = ["CNN/DM", "XSum", "arXiv", "PubMed", "SAMSum", "Multi-News", "BigPatent", "WikiHow"]
METRICS = ["ROUGE", "BERTScore", "METEOR", "QAGS", "FactCC", "BLEU"]
CRITERIA = ["Informativeness", "Fluency", "Coherence", "Faithfulness", "Relevance", "Conciseness"]
CHALLENGES = [
    "Controlled and Tailored Summarization",
    "Efficient Encoding of Long Documents",
    "Exploiting the Structure of Long Documents",
    "Hallucinations in the Generated Summaries",
    "Identifying Important Contents from the Document",
    "Information Loss / Incoherence in Extractive Summarization",
    "Lack of Suitable Training Data",
]
TOPICS = [
    ("long document", "hierarchical encoder", "scientific articles"),
    ("factual consistency", "entailment reranking", "news reports"),
    ("dialogue summarization", "speaker-aware attention", "meeting transcripts"),
    ("query-focused summarization", "query relevance estimation", "question answering"),
    ("extractive selection", "graph-based sentence ranking", "legal opinions"),
    ("low-resource summarization", "data augmentation", "medical notes"),
    ("controllable length", "length embeddings", "mobile reading"),
    ("multi-document fusion", "cluster-aware decoding", "news events"),
]


def pick(rng, items, lo, hi):
    k = rng.randint(lo, hi)
    return sorted(rng.sample(items, k))


def make_record(rng, i):
    rid = f"p{i:02d}"
    topic, technique, application = TOPICS[i % len(TOPICS)]
    year = 2017 + (i * 5) % 7
    types = ["method"] if i % 5 else ["analysis"]
    if i % 9 == 0:
        types.append("dataset")
    if i % 13 == 0:
        types.append("metric")
    tags = set()
    for group, keys in GROUP_TAGS.items():
        if rng.random() < 0.7:
            tags.update(rng.sample(keys, rng.randint(1, 2)))
    if i % 11 == 0:
        tags = set()
    paradigms = []
    if "method" in types:
        paradigms = ["supervised"] if rng.random() < 0.7 else [rng.choice(PARADIGMS[1:])]
        if i % 8 == 0:
            paradigms.append("reinforcement")
    has_code = rng.random() < 0.45
    rec = OrderedDict()
    rec["id"] = rid
    rec["title"] = f"{technique.capitalize()} for {topic} summarization ({rid})"
    rec["abstract"] = (f"We study {topic} summarization and propose {technique}. "
                       f"Experiments on {application} show gains in summary quality.")
    if i % 3 != 0:
        rec["introduction"] = (f"Summarization of {application} is hard because of {topic}. "
                               f"Readers of {application} need short overviews. "
                               f"We introduce {technique} to address this.")
    rec["venue"] = VENUES[(i - 1) % len(VENUES)]
    rec["year"] = year
    rec["paper_types"] = sorted(set(types))
    rec["facet_tags"] = sorted(tags)
    rec["learning_paradigms"] = sorted(set(paradigms))
    rec["domains"] = pick(rng, DOMAINS, 0 if i % 10 == 0 else 1, 2)
    rec["datasets"] = pick(rng, DATASETS, 0 if i % 10 == 0 else 1, 3)
    rec["auto_metrics"] = pick(rng, METRICS, 0 if i % 10 == 0 else 1, 3)
    rec["human_criteria"] = pick(rng, CRITERIA, 0, 3)
    rec["has_code"] = has_code
    if has_code:
        rec["code_url"] = f"https://example.org/code/{rid}"
    rec["challenges"] = pick(rng, CHALLENGES, 0, 2)
    if i % 4 == 1:
        rec["indicative_summary"] = {
            "purpose": f"To give readers of {application} a short overview.",
            "audience": f"People who work with {application}.",
            "application": "Screening documents before reading them in full.",
            "problems_solutions": [
                {"problem": f"Existing models struggle with {topic}.",
                 "solution": f"The authors propose {technique}."}
            ],
        }
        rec["terminology"] = [
            {"kind": "glossary", "term": technique.title(), "definition": f"A technique for {topic}."},
        ]
    return rec


# Case variants exercise case-folded grouping; the first spelling in id order wins.
def add_case_variants(records):
    records[4]["datasets"] = sorted((set(records[4]["datasets"]) - {"CNN/DM"}) | {"cnn/dm"})
    records[17]["domains"] = sorted((set(records[17]["domains"]) - {"News"}) | {"news"})


def build_corpus(rng):
    records = [make_record(rng, i) for i in range(1, 31)]
    add_case_variants(records)
    return records


# ---------------------------------------------------------------------------
# Independent counter for the expected report

def fold(s):
    return "".join(chr(ord(c) + 32) if "A" <= c <= "Z" else c for c in s)


def pct(count, total):
    if total == 0:
        return 0.0
    return ((2 * count * 1000 + total) // (2 * total)) / 10.0


def values_of(rec, dim):
    if dim == "venue":
        return [rec["venue"]]
    if dim == "year":
        return [str(rec["year"])]
    return list(rec.get(dim, []))


def count_dimension(records, dim, name=None, keep=None):
    display = {}
    counts = {}
    total = 0
    for rec in sorted(records, key=lambda r: r["id"]):
        if keep and not keep(rec):
            continue
        total += 1
        seen = set()
        for v in sorted(values_of(rec, dim)):
            key = fold(v)
            if key in seen:
                continue
            seen.add(key)
            display.setdefault(key, v)
            counts[key] = counts.get(key, 0) + 1
    rows = sorted(((display[k], c) for k, c in counts.items()), key=lambda vc: (-vc[1], vc[0]))
    return {
        "dimension": name or dim,
        "total_papers": total,
        "multi_label": dim not in ("venue", "year"),
        "values": [{"value": v, "count": c, "percentage": pct(c, total)} for v, c in rows],
    }


def yearly(records, with_code):
    points = {}
    for rec in records:
        points.setdefault(str(rec["year"]), 0)
        if not with_code or rec["has_code"]:
            points[str(rec["year"])] += 1
    return {"metric": "with_code" if with_code else "papers", "points": dict(sorted(points.items()))}


def components(records):
    order = ["document_representation", "model_training", "summary_generation", "evaluation"]
    counts = {g: 0 for g in order}
    for rec in records:
        groups = {g for g, keys in GROUP_TAGS.items() if set(keys) & set(rec["facet_tags"])}
        if rec["domains"] or rec["datasets"] or rec["auto_metrics"] or rec["human_criteria"]:
            groups.add("evaluation")
        for g in groups:
            counts[g] += 1
    rows = sorted(((g, c) for g, c in counts.items() if c), key=lambda gc: (-gc[1], gc[0]))
    n = len(records)
    return {"dimension": "components", "total_papers": n, "multi_label": True,
            "values": [{"value": g, "count": c, "percentage": pct(c, n)} for g, c in rows]}


def expected_report(records):
    return {
        "total_papers": len(records),
        "papers_per_year": yearly(records, False),
        "code_per_year": yearly(records, True),
        "datasets": count_dimension(records, "datasets"),
        "domains": count_dimension(records, "domains"),
        "human_criteria": count_dimension(records, "human_criteria"),
        "components": components(records),
        "challenges": count_dimension(records, "challenges"),
        "learning_paradigms": {
            "all_papers": count_dimension(records, "learning_paradigms"),
            "method_papers": count_dimension(records, "learning_paradigms", keep=lambda r: "method" in r["paper_types"]),
        },
    }


# ---------------------------------------------------------------------------
# Other fixtures

def build_candidates(rng):
    out = []
    hits = set(rng.sample(range(40), 12))
    for i in range(40):
        cid = f"c{i:02d}"
        if i in hits:
            where = rng.choice(["title", "abstract"])
            word = rng.choice(["Summarization", "summaries", "SUMMARY", "summarizer"])
        else:
            where, word = None, None
        title = f"A study of topic {i} in machine translation"
        abstract = f"We evaluate parsing and tagging models on corpus {i}."
        if where == "title":
            title = f"{word} of topic {i}"
        elif where == "abstract":
            abstract = f"We look at {word} for corpus {i}."
        out.append({"id": cid, "title": title, "abstract": abstract})
    return out


def build_figures(records):
    out = []
    for rec in records[:10]:
        out.append({"paper_id": rec["id"], "kind": "figure", "ordinal": 1,
                    "caption": f"Model architecture of {rec['title'].split(' for ')[0].lower()}.",
                    "image_ref": f"figures/{rec['id']}-figure-1.png"})
        out.append({"paper_id": rec["id"], "kind": "table", "ordinal": 1,
                    "caption": f"ROUGE results on the test set for {rec['id']}.",
                    "image_ref": f"figures/{rec['id']}-table-1.png"})
    return out


def gaussian_blobs(rng, centers, per, sigma, dim):
    pts = []
    for ci, c in enumerate(centers):
        for _ in range(per):
            pts.append((ci, [c[d] + rng.gauss(0.0, sigma) for d in range(dim)]))
    return pts


def blob_centers(rng, k, sub_dim, dim, min_sep):
    centers = []
    while len(centers) < k:
        c = [rng.uniform(-20, 20) for _ in range(sub_dim)] + [0.0] * (dim - sub_dim)
        if all(math.dist(c, o) >= min_sep for o in centers):
            centers.append(c)
    return centers


def embeddings_lines(points, prefix, problem_text):
    lines = []
    for i, (ci, vec) in enumerate(points):
        lines.append(json.dumps({"statement_id": f"{prefix}{i:03d}", "paper_id": problem_text(i, ci)[0],
                                 "problem": problem_text(i, ci)[1], "vector": [round(x, 6) for x in vec]}))
    return "\n".join(lines) + "\n"


def build_pca_fixture(rng):
    # Anisotropic Gaussian cloud pushed through a random rotation.
    scales = [5.0, 4.0, 3.0, 2.5, 2.0, 1.5, 1.0, 0.5]
    d = len(scales)
    a = [[rng.gauss(0, 1) for _ in range(d)] for _ in range(d)]
    q = []
    for col in range(d):  # Gram-Schmidt on the columns of a
        v = [a[r][col] for r in range(d)]
        for u in q:
            dot = sum(x * y for x, y in zip(v, u))
            v = [x - dot * y for x, y in zip(v, u)]
        norm = math.sqrt(sum(x * x for x in v))
        q.append([x / norm for x in v])
    rows = []
    for _ in range(50):
        z = [rng.gauss(0, s) for s in scales]
        rows.append([round(sum(q[k][r] * z[k] for k in range(d)) + 3.0, 9) for r in range(d)])
    return rows


def llm_fixtures(records):
    files = {}
    for rec in records:
        if "introduction" not in rec:
            continue
        rid = rec["id"]
        topic, technique, application = TOPICS[int(rid[1:]) % len(TOPICS)]
        files[("context_factors", rid)] = (
            f"QUESTION: Why are the authors generating the summaries of the documents?\n"
            f"ANSWER: Readers of {application} need short overviews.\n\n"
            f"QUESTION: Who are they for?\nANSWER: Practitioners working with {application}.\n\n"
            f"QUESTION: How will they be used?\nANSWER: To decide which documents to read in full.\n")
        files[("problems_solutions", rid)] = (
            f"PROBLEM: Models handle {topic} poorly.\nSOLUTION: {technique.capitalize()}.\n"
            f"PROBLEM: Evaluation on {application} is scarce.\nSOLUTION: A new benchmark split.\n")
        files[("glossary", rid)] = (
            f"[{technique.title()}: A method that addresses {topic}.]\n"
            f"[{application.title()}: The documents being summarized.]\n")
        files[("acronyms", rid)] = "[ROUGE: Recall-Oriented Understudy for Gisting Evaluation]\n"
    files[("glossary", "p07")] = (
        "Here is the glossary:\n"
        "1. [Length Embedding: A learned vector that encodes the desired summary length.]\n"
        "2. [Controllable Summarization: Generating summaries that satisfy user constraints.]\n"
        "3. [Mobile Reading: Reading text on small screens.]\n")
    return files


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    root = Path(args.out)
    rng = random.Random(SEED)

    records = build_corpus(rng)
    write(root / "sample/corpus.jsonl", "".join(json.dumps(r) + "\n" for r in records))
    write(root / "sample/expected_report.json", json.dumps(expected_report(records), indent=2) + "\n")
    write(root / "sample/expected_venue.csv", "value,count,percentage\n" + "".join(
        f"{v['value']},{v['count']},{v['percentage']:.1f}\n" for v in count_dimension(records, "venue")["values"]))

    cands = build_candidates(rng)
    write(root / "sample/candidates.jsonl", "".join(json.dumps(c) + "\n" for c in cands))
    write(root / "sample/figures.json", json.dumps(build_figures(records), indent=2) + "\n")

    # Problem statements for the sample corpus: three well-separated groups.
    centers = blob_centers(rng, 3, 3, 8, 12.0)
    pts = gaussian_blobs(rng, centers, 20, 0.4, 8)
    with_ps = [r["id"] for r in records]
    write(root / "sample/problem_embeddings.jsonl",
          embeddings_lines(pts, "s", lambda i, ci: (with_ps[i % len(with_ps)], f"problem statement {i} (group {ci})")))
    write(root / "sample/challenge_labels.json", json.dumps(
        {"0": "Efficient Encoding of Long Documents", "1": "Hallucinations in the Generated Summaries",
         "2": "Lack of Suitable Training Data"}, indent=2) + "\n")

    centers = blob_centers(rng, 9, 4, 8, 10.0)
    pts = gaussian_blobs(rng, centers, 20, 0.5, 8)
    write(root / "fixtures/blobs9.jsonl",
          embeddings_lines(pts, "b", lambda i, ci: (f"q{i:03d}", f"blob {ci} statement {i}")))
    write(root / "fixtures/blobs9_truth.json", json.dumps([ci for ci, _ in pts]) + "\n")

    rows = build_pca_fixture(rng)
    write(root / "fixtures/pca_50x8.csv", "".join(",".join(repr(x) for x in r) + "\n" for r in rows))

    for (kind, rid), text in llm_fixtures(records).items():
        write(root / f"fixtures/llm/{kind}/{rid}.txt", text)


if __name__ == "__main__":
    main()
