"""Constraint propagation for FO(ID) with aggregates.

Problems are passed as text in the same format the command line tool reads.
"""

import json as _json

from . import _core
from ._core import EvalError, InvalidTheory, OracleLimit, ParseError, ServiceError

__all__ = [
    "check", "propagate", "normalize", "emit_rules", "symbolic", "rewrite", "models",
    "Sessions", "ParseError", "InvalidTheory", "ServiceError", "OracleLimit", "EvalError",
]
__version__ = "0.1.0"


def check(text):
    return _json.loads(_core.check(text))


def propagate(text, budget=None, oracle=False, keep_aux=False):
    """Propagate the theory over the structure; returns structure, text and trace."""
    return _json.loads(_core.propagate(text, budget=budget, oracle=oracle, keep_aux=keep_aux))


def normalize(text, form="enf"):
    return _core.normalize(text, form)


def emit_rules(text):
    return _core.emit_rules(text)


def symbolic(text, rounds=None, max_query_size=20000):
    return _core.symbolic(text, rounds=rounds, max_query_size=max_query_size)


def rewrite(text, query, rounds=None, max_query_size=20000):
    """(certain, possible) queries over the input predicates."""
    return _core.rewrite(text, query, rounds=rounds, max_query_size=max_query_size)


def models(text, max_unknown=30):
    return [_json.loads(m) for m in _core.models(text, max_unknown=max_unknown)]


class Sessions:
    """Configuration sessions; every call returns the session state as a dict."""

    def __init__(self):
        self._store = _core.SessionStore()

    def create(self, text, oracle=False):
        return _json.loads(self._store.create(text, oracle))

    def get(self, sid):
        return _json.loads(self._store.get(sid))

    def assign(self, sid, pred, tup, value):
        return _json.loads(self._store.assign(sid, pred, list(tup), bool(value)))

    def retract(self, sid, index=None, atom=None):
        if index is not None:
            return _json.loads(self._store.retract_index(sid, index))
        pred, tup = atom
        return _json.loads(self._store.retract_atom(sid, pred, list(tup)))

    def remove(self, sid):
        self._store.remove(sid)

    def __len__(self):
        return len(self._store)
