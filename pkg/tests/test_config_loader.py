# tests/test_config_loader.py
import json
import os
import sys
import tempfile
import unittest
from unittest.mock import patch

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config_loader import CONFIG_ENV_VAR, default_config, load_config


class TestConfigLoader(unittest.TestCase):
    """Test cases for configuration loading"""

    def setUp(self):
        """Set up a scratch directory"""
        self.tmp = tempfile.TemporaryDirectory()
        self.config_path = os.path.join(self.tmp.name, 'config.json')

    def tearDown(self):
        self.tmp.cleanup()

    @patch.dict(os.environ, {}, clear=True)
    @patch('config_loader.load_dotenv')
    def test_defaults_without_file(self, mock_dotenv):
        """Test that no file gives the defaults"""
        config = load_config()
        self.assertEqual(config, default_config())
        self.assertEqual(config['figures']['mu_values'], [0.0, 0.3, 0.6, 1.0])
        mock_dotenv.assert_called_once()

    @patch('config_loader.load_dotenv')
    def test_file_overrides_are_merged(self, mock_dotenv):
        """Test that nested sections merge and top-level keys replace"""
        with open(self.config_path, 'w', encoding='utf-8') as f:
            json.dump({'log_level': 'DEBUG', 'numerics': {'workers': 4}}, f)
        config = load_config(self.config_path)
        self.assertEqual(config['log_level'], 'DEBUG')
        self.assertEqual(config['numerics']['workers'], 4)
        self.assertEqual(config['numerics']['bisection_tol'], 1e-6)

    @patch('config_loader.load_dotenv')
    def test_environment_variable(self, mock_dotenv):
        """Test that $QSLCHAN_CONFIG names the file"""
        with open(self.config_path, 'w', encoding='utf-8') as f:
            json.dump({'figures': {'fixed_endpoint': 0.25}}, f)
        with patch.dict(os.environ, {CONFIG_ENV_VAR: self.config_path}):
            config = load_config()
        self.assertEqual(config['figures']['fixed_endpoint'], 0.25)
        self.assertEqual(config['figures']['fig4_tau_d'], 1.0)

    @patch('config_loader.load_dotenv')
    def test_missing_file_warns(self, mock_dotenv):
        """Test that a missing file falls back to the defaults"""
        with self.assertLogs('config_loader', level='WARNING'):
            config = load_config(os.path.join(self.tmp.name, 'absent.json'))
        self.assertEqual(config, default_config())

    def test_default_config_is_fresh(self):
        """Test that callers get independent copies"""
        first = default_config()
        first['numerics']['workers'] = 9
        self.assertEqual(default_config()['numerics']['workers'], 1)


if __name__ == '__main__':
    unittest.main()
