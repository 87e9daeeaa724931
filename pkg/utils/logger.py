import logging
import sys
from typing import Optional

# Plain structured output; numeric loops log summaries, never per iteration.

class ContextFilter(logging.Filter):
    """
    Injects the current step and module name into every record so that
    suite logs read as [MODULE] [STEP] message.
    """
    def __init__(self):
        super().__init__()
        self.step = "General"
        self.module_name = "Calderon"

    def filter(self, record):
        record.step = self.step
        if not getattr(record, "module_name", None):
            record.module_name = self.module_name
        return True

_context_filter = ContextFilter()


class _ModuleAdapterFilter(logging.Filter):
    """Pins the module name of one logger, the step stays shared."""
    def __init__(self, module_name: str):
        super().__init__()
        self.module_name = module_name

    def filter(self, record):
        record.module_name = self.module_name
        return True


def setup_logger(module_name: str, log_file: Optional[str] = None) -> logging.Logger:
    """
    Sets up a logger for one library module.

    Format: [YYYY-MM-DD HH:MM:SS] [LEVEL] [MODULE] [STEP] Message
    """
    if log_file is None:
        from utils.settings import LOG_FILE
        log_file = LOG_FILE

    logger = logging.getLogger(f"calderon.{module_name}")
    logger.setLevel(logging.INFO)
    logger.propagate = False

    # Avoid duplicate handlers
    if logger.hasHandlers():
        logger.handlers.clear()
    logger.filters.clear()

    formatter = logging.Formatter(
        '[%(asctime)s] [%(levelname)s] [%(module_name)s] [%(step)s] %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # Console goes to stderr so CSV-on-stdout pipelines stay clean
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    logger.addFilter(_ModuleAdapterFilter(module_name))
    logger.addFilter(_context_filter)

    return logger


def update_context(step: Optional[str] = None, module_name: Optional[str] = None):
    """
    Updates the shared step label.
    Call this when a suite or subcommand moves to a new phase.
    """
    if step:
        _context_filter.step = step
    if module_name:
        _context_filter.module_name = module_name


def log_section(logger: logging.Logger, title: str):
    """
    Logs a section divider.
    """
    logger.info("-" * 60)
    logger.info(f"STARTING PHASE: {title.upper()}")
    logger.info("-" * 60)
