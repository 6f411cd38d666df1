import importlib
import json
import logging
import os
from typing import Any, Callable, Dict, Optional

from src.errors import ConfigError
from src.router import CommandRouter

logger = logging.getLogger(__name__)

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIG_DIR = os.path.join(PROJECT_ROOT, "config")
COMMANDS_PATH = os.path.join(CONFIG_DIR, "commands.json")
FIGURES_PATH = os.path.join(CONFIG_DIR, "figures.json")


def _read_json(path: str, what: str) -> Any:
    try:
        with open(path, "r") as f:
            return json.load(f)
    # Catches errors if there is no file.
    except FileNotFoundError as e:
        logger.error("%s file not found at %s", what, path)
        raise ConfigError(f"{what} file not found at {path}") from e
    # Catches specific error info while decoding the json file.
    except json.JSONDecodeError as e:
        logger.error("Invalid JSON in %s file at %s", what, path)
        raise ConfigError(f"Invalid JSON in {what} file at {path}: {e}") from e


def _handler_map() -> Dict[str, Optional[Callable]]:
    # Handlers are listed explicitly rather than imported from arbitrary strings,
    # so the config can only reach functions declared here.
    handler_map: Dict[str, Optional[Callable]] = {
        "run_command": None,
        "reproduce_command": None,
        "tune_command": None,
        "theory_report_command": None,
    }
    try:
        experiment_handlers = importlib.import_module("src.handlers.experiment_handlers")
        handler_map["run_command"] = experiment_handlers.run_command
        handler_map["reproduce_command"] = experiment_handlers.reproduce_command
        handler_map["tune_command"] = experiment_handlers.tune_command

        theory_handlers = importlib.import_module("src.handlers.theory_handlers")
        handler_map["theory_report_command"] = theory_handlers.theory_report_command
    # Catches a specific error when importing handlers.
    except ImportError as e:
        raise ConfigError(f"Error importing handler modules: {e}") from e
    # Catches if a handler function is missing in a module.
    except AttributeError as e:
        raise ConfigError(f"Error finding handler function in module: {e}") from e
    return handler_map


def load_commands(router: CommandRouter, path: str = COMMANDS_PATH) -> None:
    # Loads the commands listed in config/commands.json into the router.
    config = _read_json(path, "Commands configuration")
    if not isinstance(config, dict) or "commands" not in config:
        raise ConfigError(f"Missing 'commands' key in commands configuration file at {path}")
    commands_list = config["commands"]
    if not isinstance(commands_list, list):
        raise ConfigError("'commands' key in config must be a list")

    handler_map = _handler_map()
    for entry in commands_list:
        name = entry.get("command")
        handler_name = entry.get("handler")
        handler_args = entry.get("handler_args")

        if not all([name, handler_name]):
            logger.warning("Skipping malformed command entry: %s", entry)
            continue

        handler = handler_map.get(handler_name)
        if handler is None:
            logger.warning("Handler '%s' not found for command %s. Skipping", handler_name, name)
            continue

        router.add_command(name, bind_handler(handler, handler_args))

    logger.debug("Commands loaded from %s", path)


def load_figures(path: str = FIGURES_PATH) -> Dict[str, dict]:
    figures = _read_json(path, "Figure configuration")
    if not isinstance(figures, dict) or not all(isinstance(v, dict) for v in figures.values()):
        raise ConfigError(f"Figure configuration at {path} must map figure ids to config objects")
    return figures


# Returns a function that waits for the parsed CLI arguments and passes the rest of
# the handler args along with them.
def bind_handler(handler: Callable, handler_args: Any) -> Callable:
    if handler_args is None:
        return handler

    def bound_handler(args):
        if isinstance(handler_args, list):
            return handler(args, *handler_args)
        elif isinstance(handler_args, dict):
            return handler(args, **handler_args)
        else:
            return handler(args, handler_args)

    return bound_handler
