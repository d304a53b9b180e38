"""JSON schemas for the command-line reports."""

SCHEMA_VERSION = "1.0"

_TEXT = {"type": "string"}
_BOOL = {"type": "boolean"}
_TEXT_MAP = {"type": "object", "additionalProperties": _TEXT}


def _report(props: dict, required: list[str]) -> dict:
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "properties": {"schema_version": {"const": SCHEMA_VERSION},
                       "command": _TEXT, "ok": _BOOL, **props},
        "required": ["schema_version", "command", "ok", *required],
    }


_INDEX_PAIR = {
    "type": "object",
    "properties": {"sum": _TEXT, "product": _TEXT,
                   "roots": {"type": ["array", "null"], "items": _TEXT},
                   "radicand": {"type": ["string", "null"]}},
    "required": ["sum", "product", "roots"],
}

_POINT = {
    "type": "object",
    "properties": {"location": _TEXT, "rank": _TEXT, "rounded_rank": {"type": "integer"},
                   "absolute_rank": {"type": ["string", "null"]}, "fuchsian": _BOOL,
                   "grounded": {"type": ["boolean", "null"]}, "indices": _INDEX_PAIR},
    "required": ["location", "rank", "rounded_rank", "indices"],
}

_STEP = {"type": "object", "properties": {"kind": _TEXT, "site": _TEXT,
                                          "data": {"type": "array", "items": _TEXT}},
         "required": ["kind", "site", "data"]}

_OPERATOR = {"type": "object", "properties": {"sigma": _TEXT, "tau": _TEXT, "eta": _TEXT},
             "required": ["sigma", "tau", "eta"]}

SCHEMAS: dict[str, dict] = {
    "classify": _report({
        "symbol": _TEXT, "ascii": _TEXT, "name": _TEXT, "riemann_reducible": _BOOL,
        "riemann_row": {"type": ["string", "null"]}, "supertype": {"type": ["string", "null"]},
        "singularities": {"type": "array", "items": _POINT},
    }, ["symbol", "name", "singularities"]),
    "normalize": _report({
        "type": _TEXT, "row": _TEXT, "operator": _OPERATOR, "constraints": _TEXT_MAP,
        "trace": {"type": "array", "items": _STEP}, "riemann_row": {"type": ["string", "null"]},
    }, ["type", "row", "operator", "trace"]),
    "indices": _report({
        "point": _POINT, "order": {"type": "integer"},
        "heads": {"type": "array", "items": {
            "type": "object",
            "properties": {"kind": _TEXT, "index": _TEXT, "ramification": {"type": "integer"},
                           "exponential_part": _TEXT_MAP, "logarithmic": _BOOL,
                           "series": {"type": "array", "items": _TEXT}},
            "required": ["kind", "index", "exponential_part"]}},
    }, ["point", "heads"]),
    "deform": _report({
        "lambda": _TEXT, "mu": _TEXT, "first_order": _TEXT, "zeroth_order": _TEXT,
        "p": _TEXT, "q": _TEXT, "indices": {"type": "array", "items": {"type": "integer"}},
        "v": {"type": "array", "items": _TEXT}, "row1": _TEXT, "apparent": _BOOL,
    }, ["lambda", "mu", "apparent", "row1"]),
    "derive": _report({
        "subcase": _TEXT, "scale": _TEXT, "m": _TEXT,
        "excluded_times": {"type": "array", "items": _TEXT},
        "c": _TEXT, "a": _TEXT, "b": _TEXT, "H": _TEXT,
        "ode": {"type": "object", "properties": {"A": _TEXT, "B": _TEXT, "C": _TEXT,
                                                 "rhs": _TEXT}},
        "conditions": {"type": "array", "items": _TEXT, "minItems": 3, "maxItems": 3},
        "compatibility": _TEXT_MAP,
    }, ["subcase", "m", "H", "ode", "conditions", "compatibility"]),
    "catalog": _report({
        "entries": {"type": "array", "items": {
            "type": "object",
            "properties": {"type": _TEXT, "symbol": _TEXT, "supertype": _TEXT, "H": _TEXT,
                           "ode": _TEXT, "param_dict": _TEXT_MAP},
            "required": ["type", "symbol", "H", "ode"]}},
    }, ["entries"]),
    "verify-catalog": _report({
        "passed": {"type": "integer"}, "total": {"type": "integer"},
        "entries": {"type": "array", "items": {
            "type": "object",
            "properties": {"type": _TEXT, "ok": _BOOL}, "required": ["type", "ok"]}},
        "equivalences": {"type": "array", "items": {
            "type": "object", "properties": {"name": _TEXT, "ok": _BOOL},
            "required": ["name", "ok"]}},
        "scaling": {"type": "array", "items": {
            "type": "object", "properties": {"name": _TEXT, "ok": _BOOL},
            "required": ["name", "ok"]}},
        "reductions": {"type": "array", "items": {
            "type": "object", "properties": {"name": _TEXT, "ok": _BOOL},
            "required": ["name", "ok"]}},
    }, ["passed", "total", "entries"]),
    "integrate": _report({
        "type": _TEXT, "params": _TEXT_MAP, "termination": _TEXT,
        "step_stats": {"type": "object", "properties": {"accepted": {"type": "integer"},
                                                        "rejected": {"type": "integer"}}},
        "samples": {"type": "array", "items": {"type": "array", "items": {"type": "number"},
                                               "minItems": 3, "maxItems": 3}},
        "residual": {"type": ["number", "null"]}, "config": {"type": "object"},
    }, ["type", "termination", "step_stats", "residual"]),
    "error": _report({
        "error": {"type": "object",
                  "properties": {"type": _TEXT, "message": _TEXT,
                                 "line": {"type": "integer"}, "column": {"type": "integer"},
                                 "expected": {"type": "array", "items": _TEXT}},
                  "required": ["type", "message"]},
    }, ["error"]),
}
