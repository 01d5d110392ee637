import logging
import sys

_loggers = {}


class _StderrHandler(logging.StreamHandler):
    """Writes to whatever sys.stderr is at emit time (CLI runners swap it)."""

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


def setup_logger(name="ptlab", level=logging.INFO, toFile=False, fileName="ptlab.log"):
    """
    Establish the named logger used across the package. Handlers are attached once per name;
    a later call may still add the file handler or change the level.

    Args
        name: name of the logger
        level: level name ("INFO", "DEBUG", ...) or numeric level
        toFile: also write records to fileName
        fileName: path of the log file when toFile is set

    """
    if isinstance(level, int):
        numeric_level = level
    else:
        numeric_level = getattr(logging, str(level).upper(), logging.INFO)
    formatter = logging.Formatter("[%(asctime)s] - %(name)s %(levelname)s %(message)s")

    logger = _loggers.get(name)
    if logger is None:
        logger = logging.getLogger(name)
        # stdout carries reports and CSV; diagnostics go to stderr
        streamHandler = _StderrHandler()
        streamHandler.setFormatter(formatter)
        logger.addHandler(streamHandler)
        _loggers[name] = logger
    logger.setLevel(numeric_level)

    if toFile and not any(isinstance(h, logging.FileHandler) for h in logger.handlers):
        fileHandler = logging.FileHandler(fileName)
        fileHandler.setFormatter(formatter)
        logger.addHandler(fileHandler)

    return logger

def get_logger(name="ptlab"):
    if name != "ptlab" and not name.startswith("ptlab."):
        name = f"ptlab.{name}"
    return logging.getLogger(name)
