"""Process entry point: build the service and hand it to uvicorn."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

import uvicorn

from .api import CourseService, create_app
from .config import load_config
from .errors import PeerCourseError


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="peercourse-api",
        description="Serve the peer review course API over HTTP.",
    )
    parser.add_argument("--config", metavar="FILE", help="key=value settings file")
    parser.add_argument("--host", default="127.0.0.1", help="bind address (default 127.0.0.1)")
    args = parser.parse_args(argv)
    try:
        settings = load_config(args.config)
    except PeerCourseError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 2
    service = CourseService(settings.data_dir)
    print(f"data dir: {settings.data_dir}")
    print(f"admin token file: {settings.data_dir / 'admin_token'}")
    uvicorn.run(
        create_app(service),
        host=args.host,
        port=settings.port,
        log_level=settings.log_level.lower(),
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
