"""JSON schemas for command-line output."""

from __future__ import annotations

import jsonschema

_VERDICT = {"enum": ["ok", "counterexample", "error"]}

ENVELOPE = {
    "type": "object",
    "required": ["command", "verdict", "payload", "elapsed_ms"],
    "properties": {
        "command": {"type": "string"},
        "verdict": _VERDICT,
        "payload": {},
        "elapsed_ms": {"type": "number", "minimum": 0},
        "error": {"type": "string"},
    },
}

_SEARCH = {
    "type": "object",
    "required": ["group", "k", "constant", "value", "witnesses", "nodes", "elapsed_ms", "method"],
    "properties": {
        "group": {"type": "string"},
        "k": {"type": "integer", "minimum": 1},
        "constant": {"type": "string"},
        "value": {"type": "integer", "minimum": 0},
        "witnesses": {"type": "array", "items": {"type": "string"}},
        "nodes": {"type": "integer", "minimum": 0},
        "elapsed_ms": {"type": "number"},
        "method": {"type": "string"},
    },
}

_CERT = {
    "type": "object",
    "required": ["case", "k", "coefficients", "minimum", "error_bound", "argmin", "margin", "verdict"],
    "properties": {
        "case": {"enum": ["I", "II"]},
        "k": {"type": "integer", "minimum": 0, "maximum": 4},
        "coefficients": {"type": "array", "items": {"type": "string"}, "minItems": 5, "maxItems": 5},
        "minimum": {"type": "number"},
        "error_bound": {"type": "number", "minimum": 0},
        "argmin": {"type": "array", "items": {"type": "string"}, "minItems": 5, "maxItems": 5},
        "margin": {"type": "number"},
        "verdict": {"enum": ["certified", "failed"]},
    },
}

_VIOLATION = {
    "type": "object",
    "required": ["property", "witnesses", "observed", "required"],
    "properties": {
        "property": {"type": "string"},
        "witnesses": {"type": "array", "items": {"type": "string"}},
    },
}

PAYLOADS = {
    "mk": {
        "type": "object",
        "required": ["group", "k", "formula", "divisor"],
        "properties": {
            "formula": {"type": "integer"},
            "bruteforce": {"type": ["integer", "null"]},
            "agree": {"type": ["boolean", "null"]},
        },
    },
    "nk": {
        "allOf": [_SEARCH, {
            "type": "object",
            "required": ["known"],
            "properties": {"known": {"type": "array"}, "agree": {"type": ["boolean", "null"]}},
        }],
    },
    "bt": _SEARCH,
    "diam": {
        "type": "object",
        "required": ["group", "diam_plus"],
        "properties": {"diam_plus": {"type": "integer", "minimum": 0}},
    },
    "construct": {
        "type": "object",
        "required": ["kind", "group", "size", "set", "checks", "verified"],
        "properties": {"checks": {"type": "object"}, "verified": {"type": "boolean"}},
    },
    "spectral": {
        "type": "object",
        "required": ["alpha", "cubic_sum", "parseval", "parseval_expected", "witness"],
    },
    "lp-cert": {"type": "array", "items": _CERT},
    "harness": {
        "type": "object",
        "required": ["suite", "violations"],
        "properties": {"violations": {"type": "array", "items": _VIOLATION}},
    },
    "table": {
        "type": "array",
        "items": {
            "type": "object",
            "required": ["group", "k", "known", "source", "search", "agree"],
            "properties": {
                "known": {"type": ["integer", "null"]},
                "search": {"type": ["integer", "null"]},
                "agree": {"type": ["boolean", "null"]},
            },
        },
    },
}


def validate(doc: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``doc`` is not a valid result."""
    jsonschema.validate(doc, ENVELOPE)
    if doc["verdict"] != "error" and doc["command"] in PAYLOADS:
        jsonschema.validate(doc["payload"], PAYLOADS[doc["command"]])
