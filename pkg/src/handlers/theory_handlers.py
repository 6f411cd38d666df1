import json
from typing import Any

from src.handlers.experiment_handlers import _config
from src.harness.theory_report import build_theory_report, write_theory_report


def theory_report_command(args: Any, warmup_trials: int = 30) -> int:
    config = _config(args)
    _, document = build_theory_report(
        config,
        epsilon=args.epsilon,
        warmup_trials=args.warmup_trials or warmup_trials,
        statement_constant=args.statement_constant,
    )
    write_theory_report(config, document)
    print(json.dumps(document, indent=2, sort_keys=True, default=str))
    return 0
