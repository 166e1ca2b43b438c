import inspect
import logging
import os
from datetime import date
from typing import Optional


class CLogger:
    """
        Wrapper around the Python logging module that:
        - Logs to stderr and to a dated file
        - Tags records with the calling file
        - Reads its directory and level from BELLSPLIT_LOG_DIR / BELLSPLIT_LOG_LEVEL
    """

    LOG_DIRECTORY = "logs"
    LOG_FILE_NAME = f"log_for_{str(date.today()).replace('-', '_')}.log"
    DEFAULT_LEVEL = "WARNING"

    def __init__(self, level: Optional[str] = None):
        caller_frame = inspect.stack()[1]
        caller_file = os.path.basename(caller_frame.filename)
        self.logger_name = caller_file

        if level is None:
            level = os.environ.get("BELLSPLIT_LOG_LEVEL", self.DEFAULT_LEVEL)

        self.logger = logging.getLogger(self.logger_name)
        self.logger.setLevel(self._get_level(level))

        # Avoid adding duplicate handlers
        if not self.logger.handlers:
            self._add_handlers()

    @staticmethod
    def _get_level(level_str: str) -> int:
        return {
            "DEBUG": logging.DEBUG,
            "INFO": logging.INFO,
            "WARNING": logging.WARNING,
            "WARN": logging.WARNING,
            "ERROR": logging.ERROR,
            "CRITICAL": logging.CRITICAL,
        }.get(level_str.upper(), logging.WARNING)

    def _add_handlers(self):
        formatter = logging.Formatter(
            '[%(asctime)s] [%(levelname)s] [%(name)s:%(lineno)d] %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

        # stderr only: stdout carries command output
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        self.logger.addHandler(console_handler)

        log_directory = os.environ.get("BELLSPLIT_LOG_DIR", self.LOG_DIRECTORY)

        try:
            os.makedirs(log_directory, exist_ok=True)
            file_handler = logging.FileHandler(
                os.path.join(log_directory, self.LOG_FILE_NAME))

        except OSError as e:
            self.logger.warning(
                "File logging disabled: %s | %s", type(e).__name__, e.args)
            return

        file_handler.setFormatter(formatter)
        self.logger.addHandler(file_handler)

    def get_logger(self) -> logging.Logger:
        return self.logger

    @staticmethod
    def set_level(level_str: str):
        """
        Re-levels every logger created through CLogger.
        """
        for name, logger in logging.root.manager.loggerDict.items():
            if isinstance(logger, logging.Logger) and name.endswith(".py"):
                logger.setLevel(CLogger._get_level(level_str))
