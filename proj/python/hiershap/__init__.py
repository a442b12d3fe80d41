"""Shapley and Owen attributions over coalition hierarchies."""

import json

from . import _hiershap
from ._hiershap import (
    CapacityError,
    Game,
    InvalidInput,
    ValidationError,
    exact_shapley,
    permutation_shapley,
)

__all__ = [
    "CapacityError",
    "Game",
    "InvalidInput",
    "ValidationError",
    "axis_aligned_hierarchy",
    "balanced_hierarchy",
    "check_t",
    "evaluate_metrics",
    "exact_shapley",
    "game_from_spec",
    "owen",
    "permutation_shapley",
    "predicted_eval_count",
    "segment",
]


def _dump(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def game_from_spec(spec):
    return Game.from_spec(_dump(spec))


def owen(game, hierarchy, threads=1):
    return _hiershap.owen(game, _dump(hierarchy), threads)


def predicted_eval_count(hierarchy):
    return _hiershap.predicted_eval_count(_dump(hierarchy))


def balanced_hierarchy(fanouts):
    return json.loads(_hiershap.balanced_hierarchy(list(fanouts)))


def axis_aligned_hierarchy(width, height, grids):
    return json.loads(_hiershap.axis_aligned_hierarchy(width, height, list(grids)))


def segment(image, **kwargs):
    out = _hiershap.segment(image, **kwargs)
    out["hierarchy"] = json.loads(out["hierarchy"])
    out["metadata"] = json.loads(out["metadata"])
    return out


def check_t(game, hierarchy, tau):
    return json.loads(_hiershap.check_t(game, _dump(hierarchy), float(tau)))


def evaluate_metrics(attr, mask, bbox=None, game=None, aopc_fraction=0.1, aopc_steps=10):
    return json.loads(
        _hiershap.evaluate_metrics(attr, mask, bbox, game, aopc_fraction, aopc_steps)
    )
