# SPDX-License-Identifier: Apache-2.0
"""Analytical LLM inference simulator."""

import json

from . import _llmsim
from ._llmsim import (
    ConfigError,
    IoError,
    LookupError,
    ValidationError,
    assumptions,
    kv_bytes_per_token,
    param_count,
)

__all__ = [
    "ConfigError",
    "IoError",
    "LookupError",
    "ValidationError",
    "assumptions",
    "cli",
    "compare",
    "kv_bytes_per_token",
    "models",
    "param_count",
    "profiles",
    "reproduce",
    "run",
    "run_document",
]


def profiles():
    """Builtin hardware profiles keyed by name, in declaration order."""
    return {p["name"]: p for p in json.loads(_llmsim.profiles_json())["profiles"]}


def models():
    """Builtin model presets keyed by name."""
    return {m["name"]: m for m in json.loads(_llmsim.models_json())["models"]}


def run_document(document):
    """Runs a scenario document (dict or JSON text) and returns its records."""
    text = document if isinstance(document, str) else json.dumps(document)
    return json.loads(_llmsim.run_document(text))["runs"]


def run(model, profile, *, batch=1, n_input=1000, n_output=100, weight_bits=16,
        kv_bits=16, activation_bits=16, orchestration_ms=0.0, scenario="run"):
    """Runs one scenario on a single profile and returns its record."""
    doc = {
        "scenarios": [{
            "scenario": scenario,
            "model": model,
            "format": {"weight_bits": weight_bits, "kv_bits": kv_bits,
                       "activation_bits": activation_bits},
            "workload": {"batch": batch, "n_input": n_input, "n_output": n_output},
            "deployment": {"profile": profile, "orchestration_s": orchestration_ms / 1000.0},
        }]
    }
    return run_document(doc)[0]


def reproduce(suite):
    """Runs the builtin 'cloud' or 'mobile' suite."""
    return run_document(_llmsim.builtin_scenarios_json(suite))


def compare(records, baseline):
    """Ratios of every deployment against `baseline`, per scenario."""
    text = json.dumps({"meta": {"tool": "llmsim", "version": "0.1.0"}, "runs": records})
    return json.loads(_llmsim.compare_records(text, baseline))


def cli(*args):
    """Runs the command-line tool in-process; returns (status, stdout, stderr)."""
    return _llmsim.run_cli([str(a) for a in args])
