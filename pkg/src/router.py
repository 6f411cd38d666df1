import logging
from typing import Any, Callable, Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)


class CommandRouter:
    # Maps a CLI subcommand name to the handler that runs it, the same way a request
    # path is mapped to its handler.

    def __init__(self) -> None:
        # Commands are stored as:
        # self.commands = {"name": {"handler": handler, "handler_args": handler_args}}
        self.commands: Dict[str, Dict[str, Any]] = {}

    def add_command(
        self,
        name: str,
        handler: Callable,
        handler_args: Optional[Dict[str, Any]] = None,
    ) -> None:
        # Command names are matched case-insensitively.
        name = name.lower()
        self.commands[name] = {
            "handler": handler,
            "handler_args": handler_args,
        }
        logger.debug("Command added: %s", name)

    def get_handler(self, name: str) -> Tuple[Optional[Callable], Optional[Dict[str, Any]]]:
        info = self.commands.get(name.lower())
        if info:
            return info["handler"], info["handler_args"]
        return None, None

    def names(self) -> List[str]:
        return sorted(self.commands)
