"""
Configuration module for the squeezing simulator
Supports environment-based profiles for development, production and tests
"""
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from simulator.exceptions import ConfigError
from simulator.verification import VerificationSettings

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


@dataclass
class Config:
    """Base configuration with sensible defaults"""

    # Base directory of the application
    BASE_DIR: Path = Path(__file__).parent.absolute()

    # Output configuration
    OUTPUT_FOLDER: Path = Path(__file__).parent.parent.absolute() / 'outputs'
    PLOT_WIDTH: int = 640
    PLOT_HEIGHT: int = 400

    # Run defaults
    DEFAULT_T_MAX: float = 50.0
    DEFAULT_DT: float = 0.01
    WORKERS: int = 1

    # Oracle configuration
    ODE_DT: float = 1e-3
    ODE_T_MAX: float = 20.0
    ODE_COARSE_DT: float = 1e-2
    RANDOM_STATES: int = 1000
    RANDOM_SEED: int = 12345
    BOUND_SAMPLES: int = 100000
    BOUND_SEED: int = 2024
    BOUND_REFINE: bool = True

    # Logging
    LOG_LEVEL: str = 'INFO'

    def __post_init__(self):
        """Validate settings"""
        self.LOG_LEVEL = str(self.LOG_LEVEL).upper()
        if self.LOG_LEVEL not in LOG_LEVELS:
            raise ConfigError('LOG_LEVEL', f"Unknown log level '{self.LOG_LEVEL}'")
        if self.WORKERS < 1:
            raise ConfigError('WORKERS', "Need at least one worker")
        for name in ('DEFAULT_T_MAX', 'DEFAULT_DT', 'ODE_DT', 'ODE_T_MAX', 'ODE_COARSE_DT'):
            if not getattr(self, name) > 0:
                raise ConfigError(name, "Must be positive")
        if self.DEFAULT_DT > self.DEFAULT_T_MAX:
            raise ConfigError('DEFAULT_DT', "Grid step exceeds the time span")
        if self.RANDOM_STATES < 1 or self.BOUND_SAMPLES < 1:
            raise ConfigError('RANDOM_STATES/BOUND_SAMPLES', "Sample counts must be positive")
        self.OUTPUT_FOLDER = Path(self.OUTPUT_FOLDER)

    @classmethod
    def from_env(cls) -> 'Config':
        """Create configuration; only the log level is read from the environment"""
        level = os.environ.get('SQUEEZING_LOG_LEVEL')
        return cls(LOG_LEVEL=level) if level else cls()

    def verification_settings(self) -> VerificationSettings:
        return VerificationSettings(
            ode_dt=self.ODE_DT,
            ode_t_max=self.ODE_T_MAX,
            ode_coarse_dt=self.ODE_COARSE_DT,
            random_states=self.RANDOM_STATES,
            random_seed=self.RANDOM_SEED,
            bound_samples=self.BOUND_SAMPLES,
            bound_seed=self.BOUND_SEED,
            refine=self.BOUND_REFINE,
        )


@dataclass
class DevelopmentConfig(Config):
    """Development configuration with verbose logging"""
    LOG_LEVEL: str = 'DEBUG'


@dataclass
class ProductionConfig(Config):
    """Production configuration: quiet logs, parallel sweeps"""
    LOG_LEVEL: str = 'WARNING'
    WORKERS: int = max(1, os.cpu_count() or 1)


@dataclass
class TestingConfig(Config):
    """Testing configuration with temp directories and small oracle runs"""
    LOG_LEVEL: str = 'DEBUG'

    # Use temp directories for testing
    OUTPUT_FOLDER: Path = Path('/tmp/squeezing_test/outputs')

    RANDOM_STATES: int = 200
    BOUND_SAMPLES: int = 20000


# Configuration factory
def get_config(env: Optional[str] = None) -> Config:
    """
    Get configuration based on environment

    Args:
        env: Environment name ('development', 'production', 'testing')
             If None, reads from SQUEEZING_ENV environment variable

    Returns:
        Configuration instance
    """
    if env is None:
        env = os.environ.get('SQUEEZING_ENV', 'production')

    configs = {
        'development': DevelopmentConfig,
        'production': ProductionConfig,
        'testing': TestingConfig,
    }

    config_class = configs.get(env.lower(), ProductionConfig)
    return config_class.from_env()
