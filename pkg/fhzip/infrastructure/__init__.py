# fhzip infrastructure layer
from .container import ServiceContainer, configure_services
from .logging import setup_logging

__all__ = ["ServiceContainer", "configure_services", "setup_logging"]
