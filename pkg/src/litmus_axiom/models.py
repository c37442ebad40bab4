"""The shipped memory models and loading of user-supplied model files."""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .catdsl import ModelDef, parse_model

C11_MODELS = ("c11_orig", "c11_partial", "c11_simp")
OPENCL_MODELS = ("opencl_simp", "opencl_scoped")
BUILTIN = C11_MODELS + OPENCL_MODELS

_INCL = re.compile(r"^let incl = .*$", re.MULTILINE)


def _read(fname: str) -> str:
    return resources.files("litmus_axiom").joinpath("cat", fname).read_text(encoding="utf-8")


def model_text(name: str, new_incl: bool = False) -> str:
    if name not in BUILTIN:
        raise KeyError(f"unknown model {name!r}; choose from {', '.join(BUILTIN)}")
    base = "c11_base.cat" if name in C11_MODELS else "opencl_base.cat"
    text = _read(base) + "\n" + _read(name + ".cat")
    if new_incl:
        if name not in OPENCL_MODELS:
            raise ValueError("new_incl applies to OpenCL models only")
        text, count = _INCL.subn("let incl = new-incl", text)
        assert count == 1
    return text


@lru_cache(maxsize=None)
def get_model(name: str, new_incl: bool = False) -> ModelDef:
    label = name + ("+new-incl" if new_incl else "")
    return parse_model(model_text(name, new_incl), label)


def load_model(path: str | Path) -> ModelDef:
    p = Path(path)
    return parse_model(p.read_text(encoding="utf-8"), p.stem)


def resolve(spec: str, new_incl: bool = False) -> ModelDef:
    """A builtin name, or a path to a model file."""
    if spec in BUILTIN:
        return get_model(spec, new_incl)
    if new_incl:
        raise ValueError("--new-incl only applies to builtin OpenCL models")
    return load_model(spec)
