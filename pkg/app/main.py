# app/main.py
import logging
import os
import sys

from dotenv import load_dotenv  # .env may set the PDL_* variables

# Load .env before app.config reads the environment.
load_dotenv()

from app import config  # noqa: E402
from app.cli import dispatch  # noqa: E402


def configure_logging():
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if config.LOG_FILE:
        # Make sure the log directory exists
        directory = os.path.dirname(config.LOG_FILE)
        if directory:
            os.makedirs(directory, exist_ok=True)
        handlers.append(logging.FileHandler(config.LOG_FILE, mode="a"))
    logging.basicConfig(
        level=getattr(logging, config.LOG_LEVEL, logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )


def main() -> int:
    configure_logging()
    logger = logging.getLogger(__name__)
    logger.info(f"Starting pdl-workbench with arguments {sys.argv[1:]}")
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
