# Generated by Django 5.2.10 on 2026-10-19 09:12

import django.db.models.deletion
import simple_history.models
import taggit.managers
import uuid
from django.conf import settings
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
        ('taggit', '0006_rename_taggeditem_content_type_object_id_taggit_tagg_content_8fc721_idx'),
        migrations.swappable_dependency(settings.AUTH_USER_MODEL),
    ]

    operations = [
        migrations.CreateModel(
            name='LevelScheme',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('uuid', models.UUIDField(default=uuid.uuid4, editable=False, unique=True, verbose_name='UUID')),
                ('slug', models.SlugField(max_length=100, unique=True, verbose_name='slug')),
                ('name', models.CharField(max_length=200, verbose_name='name')),
                ('description', models.TextField(blank=True, verbose_name='description')),
                ('energies', models.JSONField(default=list, help_text='Drift energies E_0..E_{N-1}, hbar = 1', verbose_name='energies')),
                ('couplings', models.JSONField(blank=True, default=list, help_text='List of {"k", "j", "re", "im"} entries of H_C', verbose_name='couplings')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='created at')),
                ('updated_at', models.DateTimeField(auto_now=True, verbose_name='updated at')),
                ('keywords', taggit.managers.TaggableManager(blank=True, help_text='Comma-separated tags.', through='taggit.TaggedItem', to='taggit.Tag', verbose_name='keywords')),
            ],
            options={
                'verbose_name': 'level scheme',
                'verbose_name_plural': 'level schemes',
                'ordering': ['name'],
            },
        ),
        migrations.CreateModel(
            name='HistoricalLevelScheme',
            fields=[
                ('id', models.BigIntegerField(auto_created=True, blank=True, db_index=True, verbose_name='ID')),
                ('uuid', models.UUIDField(db_index=True, default=uuid.uuid4, editable=False, verbose_name='UUID')),
                ('slug', models.SlugField(max_length=100, verbose_name='slug')),
                ('name', models.CharField(max_length=200, verbose_name='name')),
                ('description', models.TextField(blank=True, verbose_name='description')),
                ('energies', models.JSONField(default=list, help_text='Drift energies E_0..E_{N-1}, hbar = 1', verbose_name='energies')),
                ('couplings', models.JSONField(blank=True, default=list, help_text='List of {"k", "j", "re", "im"} entries of H_C', verbose_name='couplings')),
                ('created_at', models.DateTimeField(blank=True, editable=False, verbose_name='created at')),
                ('updated_at', models.DateTimeField(blank=True, editable=False, verbose_name='updated at')),
                ('history_id', models.AutoField(primary_key=True, serialize=False)),
                ('history_date', models.DateTimeField(db_index=True)),
                ('history_change_reason', models.CharField(max_length=100, null=True)),
                ('history_type', models.CharField(choices=[('+', 'Created'), ('~', 'Changed'), ('-', 'Deleted')], max_length=1)),
                ('history_user', models.ForeignKey(null=True, on_delete=django.db.models.deletion.SET_NULL, related_name='+', to=settings.AUTH_USER_MODEL)),
            ],
            options={
                'verbose_name': 'historical level scheme',
                'verbose_name_plural': 'historical level schemes',
                'ordering': ('-history_date', '-history_id'),
                'get_latest_by': ('history_date', 'history_id'),
            },
            bases=(simple_history.models.HistoricalChanges, models.Model),
        ),
        migrations.CreateModel(
            name='SweepRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('uuid', models.UUIDField(default=uuid.uuid4, editable=False, unique=True, verbose_name='UUID')),
                ('code', models.SlugField(max_length=100, unique=True, verbose_name='code')),
                ('config', models.JSONField(default=dict, verbose_name='configuration')),
                ('master_seed', models.BigIntegerField(default=0, verbose_name='master seed')),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('running', 'Running'), ('done', 'Done'), ('failed', 'Failed')], db_index=True, default='pending', max_length=20, verbose_name='status')),
                ('summary', models.JSONField(blank=True, default=list, help_text='Success fractions per (dimension, detuning) cell', verbose_name='summary')),
                ('error', models.TextField(blank=True, verbose_name='error')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='created at')),
                ('updated_at', models.DateTimeField(auto_now=True, verbose_name='updated at')),
                ('tags', taggit.managers.TaggableManager(blank=True, help_text='A comma-separated list of tags.', through='taggit.TaggedItem', to='taggit.Tag', verbose_name='tags')),
            ],
            options={
                'verbose_name': 'sweep run',
                'verbose_name_plural': 'sweep runs',
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='HistoricalSweepRun',
            fields=[
                ('id', models.BigIntegerField(auto_created=True, blank=True, db_index=True, verbose_name='ID')),
                ('uuid', models.UUIDField(db_index=True, default=uuid.uuid4, editable=False, verbose_name='UUID')),
                ('code', models.SlugField(max_length=100, verbose_name='code')),
                ('config', models.JSONField(default=dict, verbose_name='configuration')),
                ('master_seed', models.BigIntegerField(default=0, verbose_name='master seed')),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('running', 'Running'), ('done', 'Done'), ('failed', 'Failed')], db_index=True, default='pending', max_length=20, verbose_name='status')),
                ('summary', models.JSONField(blank=True, default=list, help_text='Success fractions per (dimension, detuning) cell', verbose_name='summary')),
                ('error', models.TextField(blank=True, verbose_name='error')),
                ('created_at', models.DateTimeField(blank=True, editable=False, verbose_name='created at')),
                ('updated_at', models.DateTimeField(blank=True, editable=False, verbose_name='updated at')),
                ('history_id', models.AutoField(primary_key=True, serialize=False)),
                ('history_date', models.DateTimeField(db_index=True)),
                ('history_change_reason', models.CharField(max_length=100, null=True)),
                ('history_type', models.CharField(choices=[('+', 'Created'), ('~', 'Changed'), ('-', 'Deleted')], max_length=1)),
                ('history_user', models.ForeignKey(null=True, on_delete=django.db.models.deletion.SET_NULL, related_name='+', to=settings.AUTH_USER_MODEL)),
            ],
            options={
                'verbose_name': 'historical sweep run',
                'verbose_name_plural': 'historical sweep runs',
                'ordering': ('-history_date', '-history_id'),
                'get_latest_by': ('history_date', 'history_id'),
            },
            bases=(simple_history.models.HistoricalChanges, models.Model),
        ),
        migrations.CreateModel(
            name='SweepResult',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('dimension', models.PositiveSmallIntegerField(verbose_name='dimension')),
                ('detuning', models.FloatField(verbose_name='detuning')),
                ('goal_index', models.PositiveIntegerField(default=0, verbose_name='goal index')),
                ('seed', models.BigIntegerField(verbose_name='instance seed')),
                ('distance', models.FloatField(blank=True, null=True, verbose_name='distance')),
                ('rwa_infidelity', models.FloatField(blank=True, null=True, verbose_name='RWA infidelity')),
                ('exact_infidelity', models.FloatField(blank=True, null=True, verbose_name='exact infidelity')),
                ('rwa_success', models.BooleanField(null=True, verbose_name='RWA success')),
                ('exact_success', models.BooleanField(null=True, verbose_name='exact success')),
                ('duration', models.FloatField(blank=True, null=True, verbose_name='duration')),
                ('evaluations', models.PositiveIntegerField(blank=True, null=True, verbose_name='evaluations')),
                ('method', models.CharField(blank=True, max_length=30, verbose_name='method')),
                ('error', models.CharField(blank=True, max_length=50, verbose_name='error')),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='results', to='pulseman.sweeprun', verbose_name='run')),
            ],
            options={
                'verbose_name': 'sweep result',
                'verbose_name_plural': 'sweep results',
                'ordering': ['dimension', 'detuning', 'seed'],
                'constraints': [models.UniqueConstraint(fields=('run', 'dimension', 'detuning', 'seed'), name='pulseman_sweepresult_unique_cell')],
            },
        ),
    ]
