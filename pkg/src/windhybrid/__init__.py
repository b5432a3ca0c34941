"""Bivariate multistep wind speed / wind power forecasting with a CNN-LSTM -> AR hybrid."""

__version__ = "0.1.0"
