"""Sweep admin."""

from django.contrib import admin

from pulseman.models import SweepResult, SweepRun


class SweepResultInline(admin.TabularInline):
    model = SweepResult
    extra = 0
    can_delete = False
    fields = [
        "dimension",
        "detuning",
        "goal_index",
        "rwa_infidelity",
        "exact_infidelity",
        "rwa_success",
        "exact_success",
        "duration",
        "error",
    ]
    readonly_fields = fields

    def has_add_permission(self, request, obj=None):
        return False


@admin.register(SweepRun)
class SweepRunAdmin(admin.ModelAdmin):
    list_display = ["code", "status", "master_seed", "results_count", "created_at"]
    list_filter = ["status"]
    search_fields = ["code", "tags__name"]
    readonly_fields = ["uuid", "config", "summary", "error", "created_at", "updated_at"]
    inlines = [SweepResultInline]

    fieldsets = [
        (None, {"fields": ("code", "status", "master_seed", "tags")}),
        ("Configuration", {"fields": ("config",)}),
        ("Results", {"fields": ("summary", "error")}),
        ("Audit", {"fields": ("uuid", "created_at", "updated_at"), "classes": ("collapse",)}),
    ]

    def results_count(self, obj):
        return obj.results.count()

    results_count.short_description = "Results"
