"""
HTTP client for a text-prompted segmentation service.

Request: multipart POST of the image (PNG) and a text phrase.
Response: JSON {"mask_png": base64 PNG or null, "confidence": float}.
A null or empty mask is a segmentation failure, not a transport failure.
"""

import base64
import io
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
import requests
from PIL import Image

from ..core.errors import SegmenterUnavailable


@dataclass
class SegmentationResponse:
    """One object's mask and the segmenter's confidence in it."""
    mask: np.ndarray
    confidence: float


@dataclass
class SegmenterClientConfig:
    """Configuration for HttpSegmenterClient."""
    endpoint: str
    timeout: int = 60
    max_retries: int = 3


def encode_png(image: np.ndarray) -> bytes:
    """Float H×W×3 image in [0, 1] -> PNG bytes."""
    data = np.clip(np.rint(np.asarray(image) * 255.0), 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(data).save(buf, format="PNG")
    return buf.getvalue()


def decode_mask_png(payload: str) -> np.ndarray:
    """Base64 PNG -> bool mask (nonzero = foreground)."""
    with Image.open(io.BytesIO(base64.b64decode(payload))) as img:
        return np.asarray(img.convert("L")) > 0


class HttpSegmenterClient:
    """
    Segmenter service client.

    Stateful (holds a requests.Session); use one instance per worker.
    """

    def __init__(self, config: SegmenterClientConfig):
        self.config = config
        self._session = requests.Session()

    def _request_with_retry(self, method: str, url: str, **kwargs) -> requests.Response:
        """Make a request with retry logic; transport failures become SegmenterUnavailable."""
        timeout = kwargs.pop("timeout", self.config.timeout)
        last_error: Optional[Exception] = None

        for attempt in range(self.config.max_retries):
            try:
                response = self._session.request(method, url, timeout=timeout, **kwargs)
                response.raise_for_status()
                return response
            except (requests.exceptions.Timeout, requests.exceptions.ConnectionError) as e:
                last_error = e
            except requests.exceptions.HTTPError as e:
                # Client errors will not fix themselves
                if e.response is not None and e.response.status_code < 500:
                    raise SegmenterUnavailable(f"Segmenter rejected request: {e}") from e
                last_error = e
            if attempt < self.config.max_retries - 1:
                time.sleep(2 ** attempt)

        raise SegmenterUnavailable(
            f"Segmenter at {self.config.endpoint} failed after {self.config.max_retries} attempts: {last_error}"
        )

    def segment(self, image: np.ndarray, phrase: str) -> Optional[SegmentationResponse]:
        """
        Segment one phrase in an image.

        Returns:
            SegmentationResponse, or None when the service found nothing
        """
        response = self._request_with_retry(
            "POST", self.config.endpoint,
            files={"image": ("image.png", encode_png(image), "image/png")},
            data={"phrase": phrase},
        )
        try:
            data = response.json()
        except ValueError as e:
            raise SegmenterUnavailable(f"Segmenter returned invalid JSON: {e}") from e

        payload = data.get("mask_png")
        if not payload:
            return None
        return SegmentationResponse(
            mask=decode_mask_png(payload),
            confidence=float(data.get("confidence", 0.0)),
        )

    def close(self):
        self._session.close()
