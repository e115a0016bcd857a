"""
데이터셋 매니페스트 Repository
JSON 매니페스트 + 평면 바이너리 (화소 1바이트, 행 우선, 라벨 파일은 선택)
"""
import json
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
from pydantic import ValidationError

from app.core.constants import ErrorMessages
from app.core.constants import ExperimentConstants as EC
from app.core.exceptions import LabelRangeError, ManifestNotFoundError, ManifestShapeError
from app.models.dataset import Dataset
from app.schemas.dataset import DatasetManifest
from app.utils.image_utils import ImageUtils

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class DatasetRepository:
    """매니페스트 디렉터리 단위 데이터셋 저장/로드"""

    def __init__(self, directory: PathLike):
        self.directory = Path(directory)

    @property
    def manifest_path(self) -> Path:
        return self.directory / EC.MANIFEST_FILE

    def save(self, dataset: Dataset, include_labels: bool = True) -> Path:
        """화소/라벨 바이너리와 매니페스트 기록"""
        self.directory.mkdir(parents=True, exist_ok=True)
        count, height, width, channels = dataset.images.shape
        labels_name: Optional[str] = None

        (self.directory / EC.PIXELS_FILE).write_bytes(ImageUtils.to_bytes(dataset.images).tobytes())
        if include_labels and dataset.is_labeled:
            labels_name = EC.LABELS_FILE
            (self.directory / labels_name).write_bytes(dataset.labels.astype(np.uint8).tobytes())

        manifest = DatasetManifest(
            height=height,
            width=width,
            channels=channels,
            count=count,
            num_classes=dataset.num_classes,
            pixels=EC.PIXELS_FILE,
            labels=labels_name,
        )
        self.manifest_path.write_text(json.dumps(manifest.model_dump(), indent=2), encoding="utf-8")
        logger.info(f"데이터셋 저장: {self.manifest_path} (N={count}, 라벨={'있음' if labels_name else '없음'})")
        return self.manifest_path

    @staticmethod
    def read_manifest(manifest_path: PathLike) -> DatasetManifest:
        path = Path(manifest_path)
        if not path.is_file():
            raise ManifestNotFoundError(ErrorMessages.manifest_missing(path))
        try:
            return DatasetManifest.model_validate_json(path.read_text(encoding="utf-8"))
        except ValidationError as e:
            raise ManifestShapeError(f"매니페스트 형식 오류 ({path}): {e.errors()[0]['msg']}") from e

    @staticmethod
    def _read_binary(path: Path, expected: int) -> np.ndarray:
        if not path.is_file():
            raise ManifestNotFoundError(ErrorMessages.manifest_missing(path))
        raw = np.frombuffer(path.read_bytes(), dtype=np.uint8)
        if raw.size != expected:
            raise ManifestShapeError(ErrorMessages.manifest_size(path, expected, raw.size))
        return raw

    @classmethod
    def load(cls, manifest_path: PathLike) -> Dataset:
        """매니페스트 → Dataset (바이트 / 255 로 [0, 1] 변환)"""
        path = Path(manifest_path)
        manifest = cls.read_manifest(path)
        base = path.parent

        raw = cls._read_binary(base / manifest.pixels, manifest.pixel_bytes)
        images = ImageUtils.from_bytes(
            raw.reshape(manifest.count, manifest.height, manifest.width, manifest.channels)
        )

        labels = None
        if manifest.labels is not None:
            labels = cls._read_binary(base / manifest.labels, manifest.count).astype(np.int64)
            bad = labels >= manifest.num_classes
            if bad.any():
                raise LabelRangeError(
                    ErrorMessages.label_out_of_range(int(labels[bad][0]), manifest.num_classes)
                )

        logger.debug(f"데이터셋 로드: {path} (N={manifest.count})")
        return Dataset(images=images, labels=labels, num_classes=manifest.num_classes)


def save_manifest_dataset(dataset: Dataset, directory: PathLike, include_labels: bool = True) -> Path:
    return DatasetRepository(directory).save(dataset, include_labels)


def load_manifest_dataset(manifest_path: PathLike) -> Dataset:
    return DatasetRepository.load(manifest_path)
