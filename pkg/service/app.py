"""
FastAPI surface for the quantizer: the batch commands as JSON endpoints
"""

import json
import logging
import time
from typing import Callable, Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool

from algebra.errors import SchemaError
from config.constants import HTTP_STATUS, LOG_FORMAT, REPORT_VERSION
from config.settings import config, parse_degree_schedule
from service.pipelines import Report, cmd_quantize, cmd_twist_solve, cmd_verify
from service.problem import build_problem, parse_problem


def configure_logging(level: Optional[str] = None):
    """Console plus UTF-8 file logging for every entry point"""
    logging.basicConfig(
        level=getattr(logging, (level or config.get("log_level")).upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=[
            logging.StreamHandler(),
            logging.FileHandler(config.get("log_file"), encoding='utf-8')
        ]
    )


configure_logging()
logger = logging.getLogger(__name__)

STARTED = time.time()


def create_app() -> FastAPI:
    """Create and configure the FastAPI application"""
    app = FastAPI(title="Twist quantizer")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_credentials=True,
        allow_methods=["*"],
        allow_headers=["*"],
    )
    return app


app = create_app()


def _error(message: str, status: int, witness=None) -> JSONResponse:
    body = {"error": {"message": message}}
    if witness is not None:
        body["error"]["witness"] = json.loads(json.dumps(witness, default=str))
    return JSONResponse(content=body, status_code=status)


def _optional_int(request: Request, name: str, minimum: Optional[int] = None) -> Optional[int]:
    value = request.query_params.get(name)
    if value is None:
        return None
    try:
        number = int(value)
    except ValueError:
        raise SchemaError(f"Query parameter {name!r} must be an integer, got {value!r}") from None
    if minimum is not None and number < minimum:
        raise SchemaError(f"Query parameter {name!r} must be at least {minimum}, got {number}")
    return number


async def _run(request: Request, command: Callable[..., Report], **extra) -> JSONResponse:
    logger.info("=" * 80)
    logger.info(f"Received {request.method} {request.url.path}")
    try:
        try:
            data = await request.json()
        except json.JSONDecodeError:
            logger.error("Invalid JSON in request")
            return _error("Invalid JSON", HTTP_STATUS["BAD_REQUEST"])

        schedule = request.query_params.get("schedule")
        problem = build_problem(
            parse_problem(data),
            order=_optional_int(request, "order", minimum=1),
            degree_schedule=parse_degree_schedule(schedule) if schedule else None,
        )
        options = {key: _optional_int(request, key) for key in extra}
        options["seed"] = _optional_int(request, "seed")
        report = await run_in_threadpool(command, problem, **options)
        logger.info(f"{report.command} finished with exit code {report.exit_code}")
        return JSONResponse(content=json.loads(report.to_json()))
    except (SchemaError, ValueError) as e:
        logger.error(f"Rejected request: {e}")
        return _error(str(e), HTTP_STATUS["BAD_REQUEST"], getattr(e, "witness", None))
    except Exception as e:
        logger.error(f"Error in {request.url.path}: {str(e)}", exc_info=True)
        return _error(str(e), HTTP_STATUS["INTERNAL_SERVER_ERROR"])


@app.post('/verify')
async def verify(request: Request):
    """Structural checks of a problem"""
    return await _run(request, cmd_verify)


@app.post('/quantize')
async def quantize(request: Request):
    """Star-product table; query parameters order, max_degree, seed, schedule"""
    return await _run(request, cmd_quantize, max_degree=None)


@app.post('/twist-solve')
async def twist_solve(request: Request):
    """Perturbative twist with its certificate"""
    return await _run(request, cmd_twist_solve)


@app.get('/health')
async def health_check():
    logger.info("Health check requested")
    return JSONResponse(content={
        "status": "healthy",
        "timestamp": time.strftime("%Y-%m-%d %H:%M:%S"),
        "uptime": time.time() - STARTED,
        "report_version": REPORT_VERSION,
    })


@app.get('/config')
async def get_config():
    """Current configuration with logging"""
    logger.info("Configuration requested")
    return JSONResponse(content=config.to_dict())
