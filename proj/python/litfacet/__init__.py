"""Faceted exploration of an annotated paper corpus.

Thin Python layer over the native ``_litfacet`` module. Results that are JSON
on the C++ side come back as plain dicts and lists.
"""

import json as _json

from . import _litfacet
from ._litfacet import LitfacetError

__all__ = [
    "Corpus",
    "LitfacetError",
    "bm25_scores",
    "build_prompt",
    "cluster_embeddings",
    "extract_offline",
    "hdbscan",
    "keyword_screen",
    "load_corpus",
    "parse_completion",
    "pca",
    "run_cli",
    "taxonomy",
    "validate_record",
]

PROMPT_KINDS = ("context_factors", "problems_solutions", "glossary", "acronyms")


def taxonomy():
    return _json.loads(_litfacet.taxonomy())


def load_corpus(path, lenient=False):
    """Returns {"records": [...], "rejected": [...], "warnings": [...]}."""
    return _json.loads(_litfacet.load_corpus(str(path), lenient))


def validate_record(record):
    return _json.loads(_litfacet.validate_record(_json.dumps(record)))


def keyword_screen(candidates_path, keyword):
    return _litfacet.keyword_screen(str(candidates_path), keyword)


def build_prompt(kind, introduction):
    return _litfacet.build_prompt(kind, introduction)


def parse_completion(kind, raw):
    return _json.loads(_litfacet.parse_completion(kind, raw))


def extract_offline(record, kind, fixtures, max_retries=2):
    return _json.loads(_litfacet.extract_offline(_json.dumps(record), kind, str(fixtures), max_retries))


def bm25_scores(documents, query):
    return _litfacet.bm25_scores(list(documents), query)


def pca(data, target_dim):
    return _litfacet.pca(data, target_dim)


def hdbscan(points, min_cluster_size=5, min_samples=None, allow_single_cluster=False):
    return _litfacet.hdbscan(points, min_cluster_size, min_samples, allow_single_cluster)


def cluster_embeddings(path, min_cluster_size=5, min_samples=None, target_dim=5, labels=None):
    text = _json.dumps({str(k): v for k, v in labels.items()}) if labels else ""
    return _json.loads(_litfacet.cluster_embeddings(str(path), min_cluster_size, min_samples, target_dim, text))


def run_cli(*args):
    """Runs the command line tool in-process. Returns (exit_code, stdout, stderr)."""
    return _litfacet.run_cli([str(a) for a in args])


class Corpus:
    """A loaded corpus with its search indexes, figures and clusters."""

    def __init__(self, corpus, figures=None, challenges=None):
        self._native = _litfacet.Corpus(
            str(corpus),
            None if figures is None else str(figures),
            None if challenges is None else str(challenges),
        )

    def __len__(self):
        return len(self._native)

    def ids(self):
        return self._native.ids()

    def paper(self, paper_id):
        return _json.loads(self._native.paper(paper_id))

    def summary(self, paper_id):
        return _json.loads(self._native.summary(paper_id))

    def search(self, query=None, **kwargs):
        q = dict(query or {})
        q.update(kwargs)
        return _json.loads(self._native.search(_json.dumps(q)))

    def report(self):
        return _json.loads(self._native.report())

    def distribution(self, dimension):
        return _json.loads(self._native.distribution(dimension))

    def figures(self, paper_id=None, q=None):
        return _json.loads(self._native.figures(paper_id, q))

    def challenges(self):
        return _json.loads(self._native.challenges())
