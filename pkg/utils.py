import os
import copy
import asyncio
import logging
import traceback
from concurrent.futures import ProcessPoolExecutor

from config import DATA_DIR, LOG_LEVEL

logger = logging.getLogger(__name__)


# ─── Logging ─────────────────────────────────────────────────────────────────

class ColorFormatter(logging.Formatter):
    COLORS = {
        logging.DEBUG:    "\033[0;37m",
        logging.INFO:     "\033[0;36m",
        logging.WARNING:  "\033[1;33m",
        logging.ERROR:    "\033[0;31m",
        logging.CRITICAL: "\033[1;31m",
    }
    NC = "\033[0m"

    def format(self, record):
        record = copy.copy(record)
        color = self.COLORS.get(record.levelno, self.NC)
        record.levelname = f"{color}{record.levelname}{self.NC}"
        record.msg = f"{color}{record.msg}{self.NC}"
        return super().format(record)


def setup_logging(level=None):
    handler = logging.StreamHandler()
    handler.setFormatter(ColorFormatter("%(asctime)s [%(levelname)s] %(name)s: %(message)s"))
    logging.basicConfig(level=level or LOG_LEVEL, handlers=[handler], force=True)


# ─── Errors ──────────────────────────────────────────────────────────────────

class WorkbenchError(Exception):
    """Base class for every error the workbench raises on purpose."""


class ParseError(WorkbenchError):

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class ReservedNameError(WorkbenchError):
    pass


class ArityError(WorkbenchError):
    pass


class JoinUndefinedError(WorkbenchError):
    pass


class PreconditionError(WorkbenchError):
    pass


class DimensionError(WorkbenchError):
    pass


class InvalidStrategyError(WorkbenchError):

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems[:5]))


class ExtractionError(WorkbenchError):
    pass


class NotMatchingError(WorkbenchError):
    pass


class BudgetExceededError(WorkbenchError):
    pass


class UnknownCombinatorError(WorkbenchError):
    pass


def handle_error(error):
    """Log an error and return the CLI exit status for it."""
    logger.debug("".join(traceback.format_tb(error.__traceback__)))
    if isinstance(error, WorkbenchError):
        logger.error(f"❌ {type(error).__name__}: {error}")
    elif isinstance(error, OSError):
        logger.error(f"❌ File error: {error}")
    else:
        logger.error(f"❌ Unexpected error: {error!r}")
    return 2


# ─── Files ───────────────────────────────────────────────────────────────────

def resolve_path(path):
    """`path` itself, or the file of that name in the data folder when only that one exists."""
    if not os.path.exists(path):
        bundled = os.path.join(DATA_DIR, path)
        if os.path.exists(bundled):
            return bundled
    return path


def read_text(path):
    path = resolve_path(path)
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def write_text(path, text):
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


# ─── Parallel runs ───────────────────────────────────────────────────────────

async def _gather(func, items, jobs):
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return await asyncio.gather(*(loop.run_in_executor(pool, func, item) for item in items))


def run_parallel(func, items, jobs=1):
    """func over items, in order; with jobs > 1 in a process pool (func must be picklable)."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    return asyncio.run(_gather(func, items, jobs))
