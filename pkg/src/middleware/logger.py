import functools
import logging
import time
from typing import Any, Callable

logger = logging.getLogger(__name__)

LOG_FORMAT = "[%(asctime)s] %(levelname)s %(name)s: %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def configure_logging(level: str = "INFO") -> None:
    numeric = logging.getLevelName(str(level).upper())
    if not isinstance(numeric, int):
        numeric = logging.INFO
    logging.basicConfig(level=numeric, format=LOG_FORMAT, datefmt=DATE_FORMAT, force=True)


def logger_middleware(handler_function: Callable) -> Callable:
    # Wraps a command handler: logs the incoming command, then its exit code and
    # duration, or the error before re-raising it.

    @functools.wraps(handler_function)
    def wrapper(args: Any, *handler_args: Any, **handler_kwargs: Any) -> int:
        command = getattr(args, "command", None) or getattr(handler_function, "__name__", "command")
        start_time = time.perf_counter()
        logger.info("Incoming command: %s", command)
        try:
            exit_code = handler_function(args, *handler_args, **handler_kwargs)
            duration = (time.perf_counter() - start_time) * 1000
            logger.info("Finished command: %s - Exit code: %s - Duration: %.2fms", command, exit_code, duration)
            return exit_code
        except Exception as e:
            duration = (time.perf_counter() - start_time) * 1000
            logger.error("Error during command %s: %s - Duration: %.2fms", command, e, duration)
            raise

    return wrapper
