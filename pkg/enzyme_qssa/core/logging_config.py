import json
import logging
import logging.config
from datetime import datetime, timezone

EXTRA_FIELDS = ("figure_id", "check_name", "config_label")


class JSONFormatter(logging.Formatter):
    def format(self, record):
        log_entry = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        for field in EXTRA_FIELDS:
            if hasattr(record, field):
                log_entry[field] = getattr(record, field)

        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_entry)


def setup_logging(level: str = "INFO", fmt: str = "json"):
    """Configure structured logging on stderr; stdout stays free for command output."""
    level = level.upper()
    formatter = fmt if fmt in ("json", "simple") else "json"
    logging_config = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "json": {"()": JSONFormatter},
            "simple": {"format": "%(levelname)s:%(name)s:%(message)s"},
        },
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "level": level,
                "formatter": formatter,
                "stream": "ext://sys.stderr",
            }
        },
        "root": {"level": "WARNING", "handlers": ["console"]},
        "loggers": {
            "enzyme_qssa": {
                "level": level,
                "handlers": ["console"],
                "propagate": False,
            }
        },
    }

    logging.config.dictConfig(logging_config)
