"""The ``.eps`` specification language: parser, printer and evaluator."""

from .evaluate import Spec, build_attacker, eval_classifier, expand_process
from .parser import parse_spec
from .printer import print_spec

__all__ = ["Spec", "build_attacker", "eval_classifier", "expand_process", "parse_spec", "print_spec"]
