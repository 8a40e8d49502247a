"""Package consisting of report sections."""
