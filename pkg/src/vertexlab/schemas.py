"""JSON Schemas (draft 2020-12) for the JSON documents printed by the CLI.

``SCHEMAS`` is keyed by ``"<group> <command>"``. Scan output is JSON lines;
its schema describes one line.
"""
from __future__ import annotations

RATIONAL = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
RATIONAL_LIST = {"type": "array", "items": RATIONAL}

FAILURE = {
    "type": ["object", "null"],
    "required": ["indices", "element", "lhs", "rhs"],
    "properties": {
        "indices": {"type": "array"},
        "element": {"type": "string"},
        "lhs": {"type": "string"},
        "rhs": {"type": "string"},
    },
}

REPORT = {
    "type": "object",
    "required": ["check", "verdict", "first_failure"],
    "properties": {
        "check": {"type": "string"},
        "verdict": {"type": "boolean"},
        "first_failure": FAILURE,
        "details": {"type": "object"},
    },
}

QEXPANSION = {
    "type": "object",
    "required": ["leading_exponent", "coefficients", "weight"],
    "additionalProperties": False,
    "properties": {
        "leading_exponent": RATIONAL,
        "coefficients": RATIONAL_LIST,
        "weight": {"type": ["integer", "null"]},
    },
}

FGL = {
    "type": "object",
    "required": ["ring", "order", "monomials"],
    "properties": {
        "ring": {"type": "string"},
        "order": {"type": "integer", "minimum": 1},
        "monomials": {
            "type": "array",
            "items": {"type": "array", "prefixItems": [{"type": "integer"}, {"type": "integer"}, RATIONAL],
                      "minItems": 3, "maxItems": 3},
        },
    },
}

SERIES = {
    "type": "object",
    "required": ["ring", "order", "coefficients"],
    "properties": {"ring": {"type": "string"}, "order": {"type": "integer"}, "coefficients": RATIONAL_LIST},
}

MLDE = {
    "type": "object",
    "required": ["order", "kappa", "lambda", "truncation"],
    "properties": {"order": {"type": "integer"}, "kappa": RATIONAL, "lambda": RATIONAL,
                   "truncation": {"type": "integer"}},
}

RING_ANALYSIS = {
    "type": "object",
    "required": ["ring", "size", "idempotent_count", "atoms", "stalks", "local", "vnr", "exchange",
                 "all_stalks_local", "all_stalks_fields", "monk_agree", "section_isomorphism"],
    "properties": {
        "ring": {"type": "string"},
        "size": {"type": "integer", "minimum": 1},
        "idempotent_count": {"type": "integer", "minimum": 1},
        "atoms": {"type": "array", "items": {"type": "string"}},
        "stalks": {"type": "array", "items": {"type": "string"}},
        **{k: {"type": "boolean"} for k in ("local", "vnr", "exchange", "all_stalks_local",
                                            "all_stalks_fields", "monk_agree", "section_isomorphism")},
    },
}

GENUS2_ENTRIES = {
    "type": "array",
    "items": {"type": "array", "items": {"type": "integer"}, "minItems": 4, "maxItems": 4},
}

SCHEMAS: dict[str, dict] = {
    "fgl verify": {
        "type": "object",
        "required": ["check", "verdict", "axioms", "order", "ring"],
        "properties": {
            "check": {"const": "fgl_axioms"},
            "verdict": {"type": "boolean"},
            "order": {"type": "integer"},
            "ring": {"type": "string"},
            "axioms": {
                "type": "object",
                "required": ["identity", "associativity", "commutativity"],
                "additionalProperties": REPORT,
            },
        },
    },
    "fgl inverse": {
        "type": "object",
        "required": ["check", "order", "inverse"],
        "properties": {"check": {"const": "formal_inverse"}, "order": {"type": "integer"}, "inverse": SERIES},
    },
    "fgl from-log": FGL,
    "hs check-iterative": REPORT,
    "hs check-f-derivation": REPORT,
    "hs check-assoc": REPORT,
    "hs conjecture34": {
        **REPORT,
        "required": REPORT["required"] + ["details"],
        "properties": {
            **REPORT["properties"],
            "details": {
                "type": "object",
                "required": ["least_N", "depth", "trivial_by_truncation"],
                "properties": {
                    "least_N": {"type": ["integer", "null"]},
                    "depth": {"type": "integer"},
                    "trivial_by_truncation": {"type": "boolean"},
                },
            },
        },
    },
    "mf eisenstein": QEXPANSION,
    "mf eta": QEXPANSION,
    "mf j": QEXPANSION,
    "mf serre": QEXPANSION,
    "mf eval": {
        "type": "object",
        "required": ["form", "tau", "terms", "value", "tail_estimate"],
        "properties": {
            "form": {"type": "string"},
            "tau": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            "terms": {"type": "integer"},
            "value": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            "tail_estimate": {"type": "number", "minimum": 0},
        },
    },
    "mlde indicial": {
        "type": "object",
        "required": ["polynomial", "coefficients", "rational_roots"],
        "properties": {"polynomial": {"type": "string"}, "coefficients": RATIONAL_LIST,
                       "rational_roots": RATIONAL_LIST},
    },
    "mlde solve": {
        "type": "object",
        "required": ["exponent", "coefficients", "resonance", "resonance_step", "mlde"],
        "properties": {
            "exponent": RATIONAL,
            "coefficients": RATIONAL_LIST,
            "resonance": {"type": "boolean"},
            "resonance_step": {"type": ["integer", "null"]},
            "mlde": MLDE,
        },
    },
    "mlde residual": {
        "type": "object",
        "required": ["residual", "zero"],
        "properties": {"residual": QEXPANSION, "zero": {"type": "boolean"}},
    },
    "mlde scan": {
        "type": "object",
        "required": ["exponents", "c", "h", "coefficients_checked", "verdict"],
        "properties": {
            "exponents": RATIONAL_LIST,
            "c": RATIONAL,
            "h": RATIONAL_LIST,
            "coefficients_checked": {"type": "integer"},
            "verdict": {"enum": ["positive-integral", "rejected"]},
            "reason": {"type": "string"},
            "multipliers": {"type": "array", "items": {"type": "integer"}},
            "vacuum_coefficients": RATIONAL_LIST,
        },
    },
    "pierce analyze": RING_ANALYSIS,
    "pierce sweep": {
        "type": "object",
        "required": ["summary", "rows"],
        "properties": {
            "summary": {"type": "object", "required": ["rings"], "additionalProperties": {"type": "integer"}},
            "rows": {"type": "array", "items": {**RING_ANALYSIS,
                                                "required": RING_ANALYSIS["required"] + ["n", "pierce_ok"]}},
        },
    },
    "theta genus1": {
        "type": "object",
        "required": ["lattice", "odd"],
        "properties": {
            "lattice": {"type": "string"},
            "odd": {"type": "boolean"},
            "theta": QEXPANSION,
            "norm_counts": {"type": "object", "additionalProperties": {"type": "integer"}},
        },
    },
    "theta genus2": {
        "type": "object",
        "required": ["lattice", "bounds", "entries", "symmetry", "diagonal"],
        "properties": {
            "lattice": {"type": "string"},
            "bounds": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
            "entries": GENUS2_ENTRIES,
            "symmetry": REPORT,
            "diagonal": {**REPORT, "required": REPORT["required"] + ["collapsed"]},
        },
    },
    "theta character": {
        "type": "object",
        "required": ["lattice", "character"],
        "properties": {"lattice": {"type": "string"}, "character": QEXPANSION},
    },
    "theta compare": {
        "type": "object",
        "required": ["lattices", "terms", "theta_equal", "theta"],
        "properties": {
            "lattices": {"type": "array", "items": {"type": "string"}},
            "terms": {"type": "integer"},
            "theta_equal": {"type": "boolean"},
            "theta": RATIONAL_LIST,
            "genus2_bounds": {"type": "array", "items": {"type": "integer"}},
            "genus2_equal": {"type": "boolean"},
        },
    },
}
