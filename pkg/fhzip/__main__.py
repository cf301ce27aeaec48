"""Allow running fhzip as a module: python -m fhzip"""

from .cli import main

if __name__ == "__main__":
    main()
