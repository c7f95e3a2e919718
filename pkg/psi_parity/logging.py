"""
Structured logging for pipeline stages and scans
"""
import logging
import json
import time
from typing import Any, Callable, Dict, Optional, TypeVar
from datetime import datetime, timezone
from functools import wraps
from contextvars import ContextVar

F = TypeVar("F", bound=Callable[..., Any])

# Context variable tagging all records of one CLI invocation
run_id_var: ContextVar[Optional[str]] = ContextVar('run_id', default=None)


class StructuredFormatter(logging.Formatter):
    """JSON formatter for structured logging"""

    def format(self, record: logging.LogRecord) -> str:
        log_data: Dict[str, Any] = {
            'timestamp': datetime.now(timezone.utc).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno,
        }

        run_id = run_id_var.get()
        if run_id:
            log_data['run_id'] = run_id

        # Add extra fields
        if hasattr(record, 'extra_fields'):
            log_data.update(record.extra_fields)

        if record.exc_info:
            log_data['exception'] = self.formatException(record.exc_info)

        return json.dumps(log_data, default=str)


class TextFormatter(logging.Formatter):
    """Single-line human readable formatter with key=value fields"""

    def format(self, record: logging.LogRecord) -> str:
        fields = getattr(record, 'extra_fields', {})
        suffix = " ".join(f"{k}={v}" for k, v in fields.items())
        line = f"{record.levelname:<8} {record.name}: {record.getMessage()}"
        return f"{line} {suffix}" if suffix else line


class ToolkitLogger:
    """Logger with keyword-field structured logging"""

    def __init__(self, name: str):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(logging.WARNING)
        self.logger.propagate = False

        # Remove existing handlers
        self.logger.handlers = []

        # StreamHandler writes to stderr; stdout is reserved for reports
        self.handler = logging.StreamHandler()
        self.handler.setFormatter(StructuredFormatter())
        self.logger.addHandler(self.handler)

    def configure(self, level: str = "WARNING", fmt: str = "json") -> None:
        self.logger.setLevel(getattr(logging, level.upper(), logging.WARNING))
        self.handler.setFormatter(StructuredFormatter() if fmt == "json" else TextFormatter())

    def _log(self, level: str, message: str, **kwargs: Any) -> None:
        """Internal logging method with extra fields"""
        extra = {'extra_fields': kwargs}
        getattr(self.logger, level)(message, extra=extra)

    def info(self, message: str, **kwargs: Any) -> None:
        self._log('info', message, **kwargs)

    def error(self, message: str, **kwargs: Any) -> None:
        self._log('error', message, **kwargs)

    def warning(self, message: str, **kwargs: Any) -> None:
        self._log('warning', message, **kwargs)

    def debug(self, message: str, **kwargs: Any) -> None:
        self._log('debug', message, **kwargs)


# Global logger instance
logger = ToolkitLogger('psi_parity')


def configure_logging(level: str, fmt: str) -> None:
    """Apply level and format from settings or CLI flags"""
    logger.configure(level, fmt)


def track_performance(stage: str) -> Callable[[F], F]:
    """Decorator logging duration and failures of a computation stage"""
    def decorator(func: F) -> F:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                logger.debug("Stage failed",
                             stage=stage,
                             function=func.__name__,
                             duration=time.perf_counter() - start_time,
                             error=str(e))
                raise
            logger.debug("Stage completed",
                         stage=stage,
                         function=func.__name__,
                         duration=time.perf_counter() - start_time)
            return result

        return wrapper  # type: ignore[return-value]

    return decorator
