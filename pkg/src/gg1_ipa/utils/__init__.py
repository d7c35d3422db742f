# -*- coding: utf-8 -*-
"""Ambient helpers: settings, logging, errors, shared types"""
