"""Python access to the synfact pipeline core."""

import json as _json

from . import _core
from ._core import (
    ConfigError,
    IntegrityError,
    ParseFailure,
    SCHEMA_VERSION,
    SynfactError,
    bleu4,
    build_prompt,
    count_words,
    is_eligible_sentence,
    meteor,
    nli_filter,
    rouge_l,
    score_pair,
    split_sentences,
    strip_markup,
    tokenize,
)

__all__ = [
    "ConfigError", "IntegrityError", "ParseFailure", "SCHEMA_VERSION", "SynfactError",
    "bleu4", "build_prompt", "check_convergence", "compute_stats", "count_words", "is_eligible_sentence",
    "knowledge_sources", "llm_filter", "load_config", "load_dataset", "meteor", "nli_filter",
    "parse_generation", "rouge_l", "run", "score_pair", "split_sentences", "strip_markup", "tokenize",
]


def knowledge_sources(page_id, title, wikitext, language, seed=0):
    """Evidence groups drawn from one page, as dicts."""
    return _json.loads(_core.knowledge_sources_json(page_id, title, wikitext, language, seed))


def parse_generation(reply):
    """The judgment in a model reply, as a dict. Raises ParseFailure."""
    return _json.loads(_core.parse_generation_json(reply))


def llm_filter(judgment, claim_class):
    """(keep, reason) for a judgment dict as returned by parse_generation."""
    return _core.llm_filter(_json.dumps(judgment), claim_class)


def compute_stats(records, languages=()):
    return _json.loads(_core.compute_stats_json(_json.dumps(list(records)), list(languages)))


def load_config(path):
    """Canonical form of a validated config file."""
    return _json.loads(_core.load_config_json(str(path)))


def run(config, resume=False):
    """Runs every stage and returns the run report."""
    return _json.loads(_core.run_json(str(config), resume))


def load_dataset(path):
    return _json.loads(_core.load_dataset_json(str(path)))


def check_convergence(sheets, threshold=4.0):
    return _json.loads(_core.check_convergence_json([str(s) for s in sheets], threshold))
