from typing import Any, Callable, cast


def self_check(check: Callable) -> Callable:
    # Marks a function as an invariant self-check; the harness collects every marked
    # function in its checks module and runs them after an experiment.

    # cast keeps the type checker quiet about the custom attribute.
    cast(Any, check)._is_self_check = True
    return check


def is_self_check(obj: Any) -> bool:
    return callable(obj) and getattr(obj, "_is_self_check", False) is True
