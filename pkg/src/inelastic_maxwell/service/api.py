from typing import Dict, List, Optional

import uvicorn
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from ..config.config import (
    API_DESCRIPTION,
    API_HOST,
    API_PORT,
    API_TITLE,
    API_VERSION,
)
from ..utils.logger import get_logger
from .service import ExperimentService

logger = get_logger(__name__)


# Define request and response models
class CoeffsRequest(BaseModel):
    e: Optional[float] = None
    p: Optional[float] = None


class CoeffsResponse(BaseModel):
    coefficients: Dict[str, float]


class W2Request(BaseModel):
    points_a: List[List[float]] = Field(min_length=1)
    points_b: List[List[float]] = Field(min_length=1)


class W2Response(BaseModel):
    w2: float


class MomentsRequest(BaseModel):
    e: float = Field(gt=0, lt=1)
    m2: float = Field(default=3.0, gt=0)
    m2bar: float = Field(default=3.0, gt=0)
    m4_0: float = Field(gt=0)
    taus: List[float] = Field(min_length=1)


class MomentsResponse(BaseModel):
    tau: List[float]
    m4: List[float]
    fixed_point: float


class HealthResponse(BaseModel):
    status: str
    version: str


def _http_error(action: str, error: Exception) -> HTTPException:
    logger.error(f"Error {action}: {error}")
    status = 400 if isinstance(error, ValueError) else 500
    return HTTPException(status_code=status, detail=f"Error {action}: {error}")


def create_app(service: Optional[ExperimentService] = None):
    """Create a FastAPI application."""
    if service is None:
        try:
            service = ExperimentService()
        except Exception as e:
            logger.error(f"Error initializing service: {e}")
            # The app still starts and reports itself unhealthy
            service = None

    app = FastAPI(title=API_TITLE, description=API_DESCRIPTION, version=API_VERSION)

    def require_service() -> ExperimentService:
        if service is None:
            logger.error("Service not initialized properly")
            raise HTTPException(status_code=500, detail="Service not initialized properly")
        return service

    @app.get("/", response_model=HealthResponse)
    async def root():
        """Root endpoint for health check."""
        status = "healthy" if service is not None else "unhealthy"
        return HealthResponse(status=status, version=API_VERSION)

    @app.post("/coeffs", response_model=CoeffsResponse)
    async def coeffs(request: CoeffsRequest):
        """Model constants for a restitution coefficient and/or a Kac exponent."""
        svc = require_service()
        try:
            return CoeffsResponse(coefficients=svc.coeffs(e=request.e, p=request.p))
        except Exception as e:
            raise _http_error("computing coefficients", e)

    @app.post("/w2", response_model=W2Response)
    async def w2(request: W2Request):
        """Exact W2 between two equal-size point clouds."""
        svc = require_service()
        try:
            return W2Response(w2=svc.w2(request.points_a, request.points_b))
        except Exception as e:
            raise _http_error("computing W2", e)

    @app.post("/moments", response_model=MomentsResponse)
    async def moments(request: MomentsRequest):
        """Fourth-moment trajectory of the self-similar flow."""
        svc = require_service()
        try:
            result = svc.moments(request.e, request.m2, request.m2bar, request.m4_0, request.taus)
            return MomentsResponse(**result)
        except Exception as e:
            raise _http_error("computing moments", e)

    return app


def start_server():
    """Start the API server."""
    app = create_app()
    logger.info(f"Starting API server on {API_HOST}:{API_PORT}")
    uvicorn.run(app, host=API_HOST, port=API_PORT)


if __name__ == "__main__":
    start_server()
