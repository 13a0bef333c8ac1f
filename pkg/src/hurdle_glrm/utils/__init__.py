from .numeric import safeguarded_newton

__all__ = ["safeguarded_newton"]
