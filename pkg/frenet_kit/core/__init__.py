# Core module for configuration, exceptions, and shared utilities
