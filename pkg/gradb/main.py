import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from gradb.cli.common import report_error
from gradb.cli.router import build_parser, dispatch, to_config
from gradb.core.exceptions import SourceError
from gradb.core.log import configure_logging

logger = logging.getLogger(__name__)

USAGE_ERROR = 2


def main(argv: Optional[List[str]] = None) -> int:
    """Run one pipeline verb; returns the process exit status"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE_ERROR

    configure_logging(args.verbose)
    try:
        config = to_config(args)
    except ValidationError as e:
        reasons = "; ".join(error["msg"] for error in e.errors())
        print(f"error\tUsage\t{reasons}", file=sys.stderr)
        return USAGE_ERROR

    logger.info(f"Running {config.verb.value} on {', '.join(str(p) for p in config.inputs) or '-'}")
    try:
        return dispatch(config)
    except (OSError, UnicodeError) as e:
        # command modules convert what they anticipate; anything else is still an input error
        logger.error(f"Error running {config.verb.value}: {e}")
        report_error(SourceError(str(e)))
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
