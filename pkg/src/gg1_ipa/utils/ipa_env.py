# -*- coding: utf-8 -*-
"gg1_ipa runtime settings loaded from the user's .env file"
import os
from dotenv import load_dotenv
from .objects import EnvSettings

# Set the default path to the .env file in the user's home directory
DEFAULT_ENV_FILE_PATH = os.path.expanduser("~/.env")

# Fall back to a project-local .env when the home file does not exist
if os.path.isfile(DEFAULT_ENV_FILE_PATH):
    ENV_FILE_PATH = DEFAULT_ENV_FILE_PATH
else:
    ENV_FILE_PATH = os.path.join(os.getcwd(), ".env")

# Existing environment variables win over the file
load_dotenv(dotenv_path=ENV_FILE_PATH, override=False)

# Create an instance of the EnvSettings class to store and manage the environment variables
shared = EnvSettings()
