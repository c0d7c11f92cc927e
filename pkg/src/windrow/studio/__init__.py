"""Configuration ingestion, experiment orchestration and result emission."""

from .config import StudyConfig, bundled_study_path, load_config

__all__ = ["StudyConfig", "bundled_study_path", "load_config"]
